#pragma once

// Posterior model probabilities for the point-null / normal-slab prior.
// Index 0 of every probability vector is the global null M0; index i >= 1 is
// the model with the signal on channel i.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "eqc/model.hpp"

namespace eqc {

struct PosteriorVector {
    std::vector<double> probs;  // length n + 1

    double null_prob() const { return probs.front(); }
    std::size_t n() const { return probs.size() - 1; }
};

/// Outcome of the detection rule at threshold p. `accepted` is the chosen
/// model index or kNone when no model reaches p.
struct Decision {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::size_t accepted = kNone;
    double threshold_p = 0.0;

    bool any() const { return accepted != kNone; }
    // Accepting a non-null model.
    bool false_positive() const { return any() && accepted >= 1; }
};

// Exact posterior. Requires n >= 2. Works with the log weights
//   log r                                         for M0
//   log((1-r)/n) - log(1 + tau2 a)/2 + tau2 s_i^2 / (2 (1 + tau2 a))   for Mi
// where s_i = a x_i + b u_i = x_i/(1-rho) + b n xbar, normalized by
// log-sum-exp. tau2 = 0 returns the prior masses exactly.
PosteriorVector posterior(std::span<const double> x, const ModelSpec& spec, const PriorSpec& prior);

// Same as posterior() but writes into `out` (length n + 1) without allocating.
void posterior_into(std::span<const double> x, const ModelSpec& spec, const PriorSpec& prior,
                    std::span<double> out);

// Unnormalized log weight exponent tau2 s_i^2 / (2 (1 + tau2 a)) for channel i
// (0-based). P(Mi | x) is increasing in it with everything else fixed.
double posterior_exponent(std::span<const double> x, const ModelSpec& spec, double tau2,
                          std::size_t channel);

// Two-channel closed form written in terms of (x_i - rho x_{-i})^2 / (1 - rho^2).
PosteriorVector posterior_n2(std::span<const double> x, double rho, const PriorSpec& prior);

// Redundant evaluation through the centred statistics
//   A_i = (x_i - xbar) + xbar (1 - rho)/(1 + (n-1) rho).
// Kept as an algebra cross-check for posterior().
PosteriorVector posterior_z_form(std::span<const double> x, const ModelSpec& spec,
                                 const PriorSpec& prior);

// Large-n approximation
//   P(Mi|x) ~ (1 + n/(1-r) sqrt((1-rho+tau2)/(1-rho)) exp(-tau2 z_i^2 / (2 (1-rho+tau2))))^-1
// with z the z-transform of x; the null mass is the complement, clamped at 0.
// Meaningful only for large n and tau2 > 0; the entries need not sum to 1
// once the clamp is active.
PosteriorVector posterior_asymptotic(std::span<const double> x, const ModelSpec& spec,
                                     const PriorSpec& prior);

// Picks the largest probability (lowest index on exact ties) and accepts it
// when it is >= p.
Decision decide(std::span<const double> probs, double p);
inline Decision decide(const PosteriorVector& post, double p) { return decide(post.probs, p); }

// Index i >= 1 of the alternative that decide(posterior(x), p) accepts, or 0
// when it accepts M0 or nothing. Skips normalization whenever no alternative
// can reach p. `scratch` is resized to n + 1 and reused across calls.
std::size_t accepted_alternative(std::span<const double> x, const ModelSpec& spec,
                                 const PriorSpec& prior, double p, std::vector<double>& scratch);

}  // namespace eqc
