#pragma once

// Closed-form large-n and rho -> 1 results: the fixed-tau2 FPP rate, the
// detection boundary of the asymptotic posterior, normal tail bounds and the
// growing-information limits.

#include <cstddef>
#include <span>
#include <string>

#include "eqc/model.hpp"

namespace eqc {

enum class FppConstant {
    // Leading constant obtained by carrying n * 2(1 - Phi(sqrt(boundary))) through
    // the normal tail asymptotic; includes the factor (1-rho)^{(1 + (1-rho)/tau2)/2}.
    derivation,
    // Same expression without that factor. Coincides with `derivation` at rho = 0.
    displayed,
};

// n^{-x} |tau| / (sqrt(pi) (1-rho+tau2)^{1 + x/2}) ((1-r)(1-p)/p)^{1+x}
//   (log(n/(1-r)) + log((p/(1-p)) sqrt((1-rho+tau2)/(1-rho))))^{-1/2}
// times (1-rho)^{(1+x)/2} for FppConstant::derivation, where x = (1-rho)/tau2.
// n is taken from spec.
double fpp_fixed_tau_rate(const ModelSpec& spec, const PriorSpec& prior, double p,
                          FppConstant constant = FppConstant::derivation);

// Exponent x = (1-rho)/tau2 of the power law n^{-x}.
double fpp_fixed_tau_exponent(const ModelSpec& spec, const PriorSpec& prior);

// z^2 threshold above which the asymptotic posterior of a channel reaches p:
//   2 ((1-rho+tau2)/tau2) log(n/(1-r) * p/(1-p) * sqrt((1-rho+tau2)/(1-rho))).
double detection_boundary(const ModelSpec& spec, const PriorSpec& prior, double p);

// P(M0 | X) -> r under the null for fixed tau2.
double null_posterior_limit(const PriorSpec& prior);

// (1 + exp{-(x_i^2 - x_{-i}^2)/2})^-1, the n = 2 posterior of M_i as rho -> 1.
// `i` is 1-based.
double rho1_posterior_limit_n2(std::span<const double> x, std::size_t i);

struct TailBounds {
    double lower = 0.0;       // t phi(t)/(t^2+1)
    double upper = 0.0;       // phi(t)/t
    double asymptotic = 0.0;  // phi(t)/t
    double log_lower = 0.0;
    double log_upper = 0.0;
};

// Bounds on 1 - Phi(t) for t > 0; the log fields stay finite where the plain
// ones underflow.
TailBounds normal_tail_bounds(double t);

enum class InfoRegime { d_to_zero, d_finite, d_to_infinity };

/// sigma_n^2 log n -> d. `d` is used only for the finite regime.
struct InfoGrowthSpec {
    InfoRegime regime = InfoRegime::d_finite;
    double d = 1.0;
};

enum class PhiArgument {
    statement,    // (1-rho) d / tau2
    proof_chain,  // sqrt(2 (1-rho) d / tau2)
};

double info_growth_phi_argument(double d, double rho, double tau2, PhiArgument form);

struct InfoGrowthLimit {
    enum class Kind {
        consistent,      // posterior of `model_index` -> 1
        limit_value,     // posterior of `model_index` -> value, not consistent
        not_consistent,  // no model is selected with probability -> 1
        indeterminate,   // d exactly on the consistency boundary
    };
    Kind kind = Kind::consistent;
    std::size_t model_index = 0;
    double value = 0.0;
};

// Limit of the posterior in the growing-information model. Under M0 with a
// finite d the null mass tends to (1 + ((1-r)/r) [2 Phi(g) - 1])^-1 with g
// chosen by `form`; under M_j with finite d the posterior is consistent iff
// d < theta^2 / (2 (1-rho)).
InfoGrowthLimit info_growth_limit(const InfoGrowthSpec& igs, const ModelSpec& spec,
                                  const PriorSpec& prior, const TruthScenario& truth,
                                  PhiArgument form = PhiArgument::proof_chain);

std::string to_string(InfoGrowthLimit::Kind kind);

}  // namespace eqc
