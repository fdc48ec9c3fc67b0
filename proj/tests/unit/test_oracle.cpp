#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eqc/bayes.hpp"
#include "eqc/errors.hpp"
#include "eqc/frequentist.hpp"
#include "eqc/random.hpp"
#include "oracle.hpp"

namespace eqc {
namespace {

TEST(DenseCovariance, InverseAndDeterminant) {
    const auto cov = oracle::make_dense(oracle::alternative_covariance(6, 0.35, 2.5, 3));
    const Eigen::MatrixXd eye = cov.inverse * cov.matrix;
    EXPECT_LT((eye - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(cov.log_det, std::log(cov.matrix.determinant()), 1e-12);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 2.0;
    EXPECT_THROW(oracle::make_dense(bad), NumericalError);
}

TEST(DensePosterior, ZeroSlabGivesPriors) {
    const ModelSpec spec(5, 0.4);
    const auto post = oracle::dense_posterior({1.0, 2.0, -3.0, 0.0, 0.5}, spec, PriorSpec(0.2, 0.0));
    EXPECT_NEAR(post.probs[0], 0.2, 1e-15);
    for (std::size_t i = 1; i <= 5; ++i) EXPECT_NEAR(post.probs[i], 0.16, 1e-15);
}

TEST(DensePosterior, DeterminantRatio) {
    for (double rho : {0.0, 0.3, 0.9}) {
        for (double tau2 : {0.1, 1.0, 25.0}) {
            const std::size_t n = 7;
            const double a = sigma_coeffs(ModelSpec(n, rho)).a;
            const auto c0 = oracle::make_dense(oracle::equicorrelation(n, rho));
            const auto ci = oracle::make_dense(oracle::alternative_covariance(n, rho, tau2, 4));
            EXPECT_NEAR(std::exp(ci.log_det - c0.log_det), 1.0 + tau2 * a, 1e-10 * (1.0 + tau2 * a));
        }
    }
}

TEST(DensePosterior, WoodburyUpdate) {
    for (std::size_t n : {2u, 5u, 15u}) {
        for (double rho : {0.0, 0.5, 0.95}) {
            for (double tau2 : {0.01, 1.0, 25.0}) {
                EXPECT_LT(oracle::woodbury_gap(n, rho, tau2, n / 2), 1e-9) << n << " " << rho << " " << tau2;
            }
        }
    }
}

TEST(DenseLr, IndependentChannelsPickLargestSquare) {
    const ModelSpec spec(5, 0.0);
    const auto lr = oracle::dense_lr({0.1, -2.5, 2.4, 0.0, 1.0}, spec);
    EXPECT_EQ(lr.argmin, 1u);
    EXPECT_NEAR(lr.log_lr, -0.5 * 6.25, 1e-14);
}

TEST(DenseLr, MaximizerAndDropFollowTheCoefficients) {
    for (std::size_t k = 0; k < 200; ++k) {
        RandomStream rng(80, k);
        const std::size_t n = 2 + k % 9;
        const ModelSpec spec(n, 0.9 * rng.uniform());
        const auto x = sample(TruthScenario::alternative(1, 2.0), spec, rng);
        const auto [a, b] = sigma_coeffs(spec);
        double total = 0.0;
        for (double v : x) total += v;
        const auto lr = oracle::dense_lr(x, spec);
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = total - x[i];
            EXPECT_NEAR(lr.theta_hat[i], x[i] + (b / a) * u, 1e-9 * (1.0 + std::abs(lr.theta_hat[i])));
            const double s = a * x[i] + b * u;
            EXPECT_NEAR(lr.quad_drop[i], s * s / a, 1e-9 * (1.0 + s * s / a));
            best = std::max(best, s * s / a);
        }
        EXPECT_NEAR(lr.lr, std::exp(-0.5 * best), 1e-12);
        EXPECT_EQ(lr.argmin, lrt_argmax(x, spec));
    }
}

TEST(DenseSample, UncorrelatedIsIndependentNormals) {
    const ModelSpec spec(4, 0.0);
    RandomStream a(81, 0);
    RandomStream b(81, 0);
    const auto x = oracle::dense_sample(TruthScenario::alternative(2, 1.5), spec, a);
    EXPECT_DOUBLE_EQ(x[0], b.normal());
    EXPECT_DOUBLE_EQ(x[1], b.normal() + 1.5);
    EXPECT_DOUBLE_EQ(x[2], b.normal());
    EXPECT_DOUBLE_EQ(x[3], b.normal());
}

TEST(DenseSample, DeterministicPerStream) {
    const ModelSpec spec(6, 0.7);
    RandomStream a(82, {1, 2});
    RandomStream b(82, {1, 2});
    EXPECT_EQ(oracle::dense_sample(TruthScenario::null_model(), spec, a),
              oracle::dense_sample(TruthScenario::null_model(), spec, b));
}

double two_sample_ks(std::vector<double> u, std::vector<double> v) {
    std::sort(u.begin(), u.end());
    std::sort(v.begin(), v.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < u.size() && j < v.size()) {
        const double t = std::min(u[i], v[j]);
        while (i < u.size() && u[i] <= t) ++i;
        while (j < v.size() && v[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / u.size() - static_cast<double>(j) / v.size()));
    }
    return d;
}

TEST(DenseSample, MarginalsMatchTheFactorSampler) {
    const ModelSpec spec(8, 0.6);
    const std::size_t reps = 20000;
    std::vector<double> dense_first, fast_first, dense_sum, fast_sum;
    for (std::size_t k = 0; k < reps; ++k) {
        RandomStream a(83, {0, k});
        RandomStream b(83, {1, k});
        const auto xd = oracle::dense_sample(TruthScenario::null_model(), spec, a);
        const auto xf = sample(TruthScenario::null_model(), spec, b);
        dense_first.push_back(xd[0]);
        fast_first.push_back(xf[0]);
        dense_sum.push_back(xd[3] + xd[5]);
        fast_sum.push_back(xf[3] + xf[5]);
    }
    // Critical value of the two-sample statistic at the 1% level.
    const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(reps));
    EXPECT_LT(two_sample_ks(dense_first, fast_first), crit);
    EXPECT_LT(two_sample_ks(dense_sum, fast_sum), crit);
}

TEST(DenseSample, PairwiseCorrelationMatchesRho) {
    const std::size_t reps = 100000;
    for (double rho : {0.2, 0.8}) {
        const ModelSpec spec(3, rho);
        double dense = 0.0, fast = 0.0;
        for (std::size_t k = 0; k < reps; ++k) {
            RandomStream a(84, {0, k});
            RandomStream b(84, {1, k});
            const auto xd = oracle::dense_sample(TruthScenario::null_model(), spec, a);
            const auto xf = sample(TruthScenario::null_model(), spec, b);
            dense += xd[0] * xd[2];
            fast += xf[0] * xf[2];
        }
        const double se = std::sqrt((1.0 + rho * rho) / static_cast<double>(reps));
        EXPECT_NEAR(dense / reps, rho, 3.0 * se);
        EXPECT_NEAR(fast / reps, rho, 3.0 * se);
    }
}

}  // namespace
}  // namespace eqc
