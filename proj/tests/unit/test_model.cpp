#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eqc/errors.hpp"
#include "eqc/model.hpp"
#include "eqc/numeric.hpp"
#include "eqc/random.hpp"

namespace eqc {
namespace {

TEST(ModelSpec, EnforcesDomain) {
    EXPECT_THROW(ModelSpec(0, 0.0), ParameterError);
    EXPECT_THROW(ModelSpec(3, 1.0), ParameterError);
    EXPECT_THROW(ModelSpec(3, -0.1), ParameterError);
    EXPECT_NO_THROW(ModelSpec(1, 0.0));
    EXPECT_THROW(PriorSpec(0.0, 1.0), ParameterError);
    EXPECT_THROW(PriorSpec(1.0, 1.0), ParameterError);
    EXPECT_THROW(PriorSpec(0.5, -1.0), ParameterError);
    EXPECT_NO_THROW(PriorSpec(0.5, 0.0));
}

TEST(TruthScenario, MeanVector) {
    const auto null = TruthScenario::null_model();
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(null.mean_at(i), 0.0);
    const auto alt = TruthScenario::alternative(2, 3.0);
    EXPECT_EQ(alt.mean_at(0), 0.0);
    EXPECT_EQ(alt.mean_at(1), 3.0);
    EXPECT_EQ(alt.mean_at(2), 0.0);
    EXPECT_THROW(TruthScenario::alternative(0, 1.0), ParameterError);
}

TEST(CheckObservation, RejectsWrongLengthAndNonFinite) {
    const ModelSpec spec(3, 0.2);
    EXPECT_THROW(check_observation(std::vector<double>{1.0, 2.0}, spec), ParameterError);
    EXPECT_THROW(check_observation(std::vector<double>{1.0, NAN, 0.0}, spec), ParameterError);
    EXPECT_NO_THROW(check_observation(std::vector<double>{1.0, 2.0, 3.0}, spec));
}

TEST(SigmaCoeffs, ClosedForms) {
    const auto identity = sigma_coeffs(ModelSpec(5, 0.0));
    EXPECT_EQ(identity.a, 1.0);
    EXPECT_EQ(identity.b, 0.0);

    const auto two = sigma_coeffs(ModelSpec(2, 0.5));
    EXPECT_NEAR(two.a, 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(two.b, -2.0 / 3.0, 1e-15);

    const auto one = sigma_coeffs(ModelSpec(1, 0.7));
    EXPECT_EQ(one.a, 1.0);
    EXPECT_EQ(one.b, 0.0);
}

TEST(SigmaCoeffs, InvertsTheEquicorrelationMatrix) {
    for (std::size_t n : {2u, 3u, 10u, 50u}) {
        for (double rho : {0.0, 0.1, 0.5, 0.9, 0.999}) {
            const auto [a, b] = sigma_coeffs(ModelSpec(n, rho));
            EXPECT_NEAR(a - b, 1.0 / (1.0 - rho), 1e-9 / (1.0 - rho));
            // Row of Sigma0 times column of the inverse, diagonal and off-diagonal.
            const double nd = static_cast<double>(n);
            const double diag = a + (nd - 1.0) * rho * b;
            const double off = rho * a + b + (nd - 2.0) * rho * b;
            EXPECT_NEAR(diag, 1.0, 1e-10);
            EXPECT_NEAR(off, 0.0, 1e-10);
        }
    }
}

TEST(ZTransform, Examples) {
    const ModelSpec spec(3, 0.4);
    const auto flat = z_transform(std::vector<double>{1.5, 1.5, 1.5}, spec);
    for (double z : flat) EXPECT_EQ(z, 0.0);
    const auto pair = z_transform(std::vector<double>{1.0, -1.0}, ModelSpec(2, 0.0));
    EXPECT_DOUBLE_EQ(pair[0], 1.0);
    EXPECT_DOUBLE_EQ(pair[1], -1.0);
}

TEST(Sample, IsDeterministicPerStream) {
    const ModelSpec spec(6, 0.3);
    RandomStream a(42, {3, 9});
    RandomStream b(42, {3, 9});
    RandomStream c(42, {3, 10});
    const auto xa = sample(TruthScenario::null_model(), spec, a);
    EXPECT_EQ(xa, sample(TruthScenario::null_model(), spec, b));
    EXPECT_NE(xa, sample(TruthScenario::null_model(), spec, c));
}

TEST(Sample, MeanVectorUnderAlternative) {
    const ModelSpec spec(4, 0.5);
    const auto truth = TruthScenario::alternative(2, 3.0);
    const std::size_t reps = 100000;
    std::vector<double> mean(4, 0.0);
    for (std::size_t k = 0; k < reps; ++k) {
        RandomStream rng(5, k);
        const auto x = sample(truth, spec, rng);
        for (std::size_t i = 0; i < 4; ++i) mean[i] += x[i] / static_cast<double>(reps);
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(reps));
    EXPECT_NEAR(mean[0], 0.0, 4 * se);
    EXPECT_NEAR(mean[1], 3.0, 4 * se);
    EXPECT_NEAR(mean[2], 0.0, 4 * se);
    EXPECT_NEAR(mean[3], 0.0, 4 * se);
}

// Empirical second moments of the common-factor sampler against Sigma0,
// entrywise within 4 standard errors (Var(X_i X_j) = 1 + rho^2 off the
// diagonal, 2 on it).
TEST(SampleProperty, CovarianceMatchesEquicorrelation) {
    const std::size_t reps = 200000;
    for (std::size_t n : {2u, 7u, 20u}) {
        for (double rho : {0.0, 0.3, 0.7, 0.95}) {
            const ModelSpec spec(n, rho);
            std::vector<double> second(n * n, 0.0);
            Observation x(n);
            for (std::size_t k = 0; k < reps; ++k) {
                RandomStream rng(11, {n, static_cast<std::uint64_t>(rho * 100), k});
                sample_into(TruthScenario::null_model(), spec, rng, x);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i; j < n; ++j) second[i * n + j] += x[i] * x[j];
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    const double target = i == j ? 1.0 : rho;
                    const double var = i == j ? 2.0 : 1.0 + rho * rho;
                    const double se = std::sqrt(var / static_cast<double>(reps));
                    EXPECT_NEAR(second[i * n + j] / static_cast<double>(reps), target, 4 * se)
                        << "n=" << n << " rho=" << rho << " (" << i << "," << j << ")";
                }
            }
        }
    }
}

TEST(SampleProperty, IndependentChannelsWhenUncorrelated) {
    const ModelSpec spec(3, 0.0);
    RandomStream rng(1, 0);
    RandomStream raw(1, 0);
    const auto x = sample(TruthScenario::null_model(), spec, rng);
    // With rho = 0 the common factor is drawn but carries zero weight.
    raw.normal();
    for (double v : x) EXPECT_DOUBLE_EQ(v, raw.normal());
}

double ks_statistic(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double m = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = numeric::normal_cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

TEST(ZTransformProperty, KolmogorovSmirnovDecreasesWithN) {
    double previous = 1.0;
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
        const ModelSpec spec(n, 0.6);
        double mean_ks = 0.0;
        const std::size_t reps = 50;
        for (std::size_t k = 0; k < reps; ++k) {
            RandomStream rng(21, {n, k});
            const auto x = sample(TruthScenario::null_model(), spec, rng);
            mean_ks += ks_statistic(z_transform(x, spec)) / reps;
        }
        EXPECT_LT(mean_ks, previous) << n;
        previous = mean_ks;
    }
}

TEST(ZTransformProperty, UnitVarianceAtLargeN) {
    const std::size_t n = 10000;
    const ModelSpec spec(n, 0.5);
    const std::size_t reps = 1000;
    std::size_t within = 0;
    double mean_var = 0.0;
    Observation x(n);
    for (std::size_t k = 0; k < reps; ++k) {
        RandomStream rng(33, k);
        sample_into(TruthScenario::null_model(), spec, rng, x);
        const auto z = z_transform(x, spec);
        double ss = 0.0;
        for (double v : z) ss += v * v;
        const double var = ss / static_cast<double>(n - 1);
        mean_var += var / reps;
        if (std::abs(var - 1.0) < 0.05) ++within;
    }
    EXPECT_NEAR(mean_var, 1.0, 0.005);
    EXPECT_GE(within, reps * 99 / 100);
}

TEST(ZTransformProperty, MaxStaysBelowPowerBound) {
    const std::size_t n = 10000;
    const ModelSpec spec(n, 0.3);
    const double bound = std::pow(static_cast<double>(n), 0.5 - 0.1);
    const std::size_t reps = 1000;
    std::size_t ok = 0;
    Observation x(n);
    for (std::size_t k = 0; k < reps; ++k) {
        RandomStream rng(34, k);
        sample_into(TruthScenario::null_model(), spec, rng, x);
        const auto z = z_transform(x, spec);
        double top = 0.0;
        for (double v : z) top = std::max(top, std::abs(v));
        if (top <= bound) ++ok;
    }
    EXPECT_GE(static_cast<double>(ok) / reps, 0.999);
}

}  // namespace
}  // namespace eqc
