#pragma once

// Brute-force reference implementations built on dense linear algebra. They
// take no shortcuts through the closed-form inverse coefficients and exist
// only to check the fast paths; keep n small.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "eqc/bayes.hpp"
#include "eqc/model.hpp"
#include "eqc/random.hpp"

namespace eqc::oracle {

struct DenseCovariance {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd inverse;
    double log_det = 0.0;
};

// Throws NumericalError when the matrix is not positive definite.
DenseCovariance make_dense(const Eigen::MatrixXd& matrix);

// (1 - rho) I + rho 11'
Eigen::MatrixXd equicorrelation(std::size_t n, double rho);
// Sigma0 + tau2 e_i e_i' (channel is 0-based)
Eigen::MatrixXd alternative_covariance(std::size_t n, double rho, double tau2, std::size_t channel);

double gaussian_log_density(const Eigen::VectorXd& x, const DenseCovariance& cov);

// Marginals m_i(x) = N(x; 0, Sigma_i) combined with the prior masses.
PosteriorVector dense_posterior(const std::vector<double>& x, const ModelSpec& spec,
                                const PriorSpec& prior);

struct DenseLr {
    double lr = 1.0;
    double log_lr = 0.0;
    std::size_t argmin = 0;          // 0-based channel
    std::vector<double> theta_hat;   // per channel maximizer of the likelihood
    std::vector<double> quad_drop;   // x'S^-1 x - min_theta (x - theta e_i)' S^-1 (x - theta e_i)
};

// LR = min_i sup_theta f(x | theta e_i) / f(x | 0), by dense generalized
// least squares for each channel.
DenseLr dense_lr(const std::vector<double>& x, const ModelSpec& spec);

// x = theta + L z with L the Cholesky factor of Sigma0.
Observation dense_sample(const TruthScenario& truth, const ModelSpec& spec, RandomStream& rng);

// Null draw with the channel of largest |z| moved so that its z-statistic
// (x_j - xbar)/sqrt(1 - rho) equals t exactly. Requires n >= 2.
Observation engineered_boundary_sample(const ModelSpec& spec, double t, RandomStream& rng);

// Largest entrywise gap between the dense inverse of Sigma_i and the rank-one
// Woodbury update of the closed-form Sigma0^{-1}.
double woodbury_gap(std::size_t n, double rho, double tau2, std::size_t channel);

}  // namespace eqc::oracle
