#pragma once

// Equicorrelated normal-means model:
//   X ~ N(theta, Sigma0),  Sigma0 = (1 - rho) I + rho 11',
// with at most one nonzero coordinate of theta.

#include <cstddef>
#include <span>
#include <vector>

#include "eqc/random.hpp"

namespace eqc {

/// Dimension and common correlation. Enforces n >= 1 and 0 <= rho < 1.
class ModelSpec {
public:
    ModelSpec(std::size_t n, double rho);

    std::size_t n() const { return n_; }
    double rho() const { return rho_; }

private:
    std::size_t n_;
    double rho_;
};

/// Point-null plus normal-slab prior: P(M0) = r, P(Mi) = (1 - r)/n, and the
/// nonzero mean under Mi drawn from N(0, tau2).
class PriorSpec {
public:
    PriorSpec(double r, double tau2);

    double r() const { return r_; }
    double tau2() const { return tau2_; }
    PriorSpec with_tau2(double tau2) const { return PriorSpec(r_, tau2); }

private:
    double r_;
    double tau2_;
};

/// Which model generated the data. Index 0 is the global null; index j >= 1
/// puts the signal theta on channel j (1-based, as in the model labels).
class TruthScenario {
public:
    static TruthScenario null_model() { return TruthScenario(0, 0.0); }
    static TruthScenario alternative(std::size_t model_index, double theta);

    std::size_t model_index() const { return model_index_; }
    double theta() const { return model_index_ == 0 ? 0.0 : theta_; }
    // Mean of channel i (0-based).
    double mean_at(std::size_t channel) const {
        return (model_index_ != 0 && channel + 1 == model_index_) ? theta_ : 0.0;
    }

private:
    TruthScenario(std::size_t model_index, double theta)
        : model_index_(model_index), theta_(theta) {}

    std::size_t model_index_;
    double theta_;
};

using Observation = std::vector<double>;

/// Entries (a on the diagonal, b off it) of Sigma0^{-1}.
struct SigmaCoeffs {
    double a = 1.0;
    double b = 0.0;
};

// Throws ParameterError unless x has length spec.n() and only finite entries.
void check_observation(std::span<const double> x, const ModelSpec& spec);

// Common-factor construction X_i = theta_i + sqrt(rho) Z + sqrt(1-rho) Z_i.
// Draw order: Z first, then Z_1..Z_n.
Observation sample(const TruthScenario& truth, const ModelSpec& spec, RandomStream& rng);
void sample_into(const TruthScenario& truth, const ModelSpec& spec, RandomStream& rng,
                 std::span<double> out);

// z_i = (x_i - mean(x)) / sqrt(1 - rho).
std::vector<double> z_transform(std::span<const double> x, const ModelSpec& spec);

// For n = 1 returns a = 1, b = 0 (Sigma0 is the scalar 1).
SigmaCoeffs sigma_coeffs(const ModelSpec& spec);

double mean_of(std::span<const double> x);

}  // namespace eqc
