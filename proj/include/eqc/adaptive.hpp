#pragma once

// Data- or design-adaptive choices of the slab variance tau2: the closed-form
// tau2 that maximizes the false positive probability, the Type II maximum
// likelihood estimate, and the asymptotic FPP formulas attached to each.

#include <cstddef>
#include <span>
#include <vector>

#include "eqc/model.hpp"

namespace eqc {

/// Threshold p, null prior r, correlation rho and dimension n, plus the
/// derived constants
///   log_odds = log(p / ((1-p)(1-r)))
///   c_tau    = 2 log_odds + log 2 + 1
/// which also serves as c(p, r).
class AdaptiveConfig {
public:
    AdaptiveConfig(double p, double r, double rho, std::size_t n);

    double p() const { return p_; }
    double r() const { return r_; }
    double rho() const { return rho_; }
    std::size_t n() const { return n_; }
    double log_odds() const { return log_odds_; }
    double c_tau() const { return c_tau_; }

private:
    double p_;
    double r_;
    double rho_;
    std::size_t n_;
    double log_odds_;
    double c_tau_;
};

// (1-rho) [2 log n + log log n + 2 log_odds + log 2]. Requires n >= 2.
double tau2_max_fpp(const AdaptiveConfig& cfg);
// True when log log n <= 0 (n <= 2), where the formula is outside its regime.
bool tau2_max_fpp_warning(std::size_t n);

// e^{-1/2} sqrt(2/pi) ((1-p)(1-r)/p) / (2 log n + log log n + c_tau). n >= 3.
double fpp_adaptive_asymptotic(const AdaptiveConfig& cfg);

// log L_n(tau2) = -log n - log(1 + tau2 a)/2
//                 + log sum_i exp{tau2 s_i^2 / (2 (1 + tau2 a))}.
// Zero at tau2 = 0.
double marginal_log_likelihood(double tau2, std::span<const double> x, const ModelSpec& spec);

// log(r + (1-r) L_n(tau2)): the likelihood ratio of the full mixture against
// M0. Same maximizer as L_n.
double weighted_marginal_log_likelihood(double tau2, std::span<const double> x,
                                        const ModelSpec& spec, double r);

// Large-n simplification in terms of z_i = (x_i - xbar)/sqrt(1-rho):
//   -log n - log((1-rho+tau2)/(1-rho))/2 + log sum_i exp{tau2 z_i^2 / (2 (1-rho+tau2))}
double marginal_log_likelihood_z_form(double tau2, std::span<const double> x,
                                      const ModelSpec& spec);

/// Precomputed statistics for repeated evaluation of log L_n.
class MarginalLikelihood {
public:
    MarginalLikelihood(std::span<const double> x, const ModelSpec& spec);

    double operator()(double tau2) const;
    std::size_t n() const { return squares_.size(); }
    double a() const { return a_; }

private:
    std::vector<double> squares_;  // s_i^2
    double max_square_ = 0.0;
    double a_ = 1.0;
};

struct Type2Estimate {
    double tau2 = 0.0;
    double log_likelihood = 0.0;
    bool at_boundary = false;  // maximum sits at tau2 = 0
};

// Upper end of the search range: 10 (1-rho)(2 log n + log log n + 20).
double type2_tau2_upper(const ModelSpec& spec);

// Maximizer of log L_n over [0, type2_tau2_upper]: 64-point scan on
// u = log(1 + tau2), then Brent refinement inside the best cell.
Type2Estimate type2_mle_tau2(std::span<const double> x, const ModelSpec& spec);

enum class KForm {
    derivation,  // (1/2 + exp(-c/2)/sqrt(pi))^-1, consistent with k* ~ 1.6142
    statement,   // (1 + 2 exp(-c/2)/sqrt(pi))^-1, diagnostic only
};

double k_of_c(double c, KForm form = KForm::derivation);

struct KStarSolution {
    double k_star = 0.0;
    double residual = 0.0;
};

// Residual of -2 log(sqrt(pi)(1/k - 1/2)) = log k + 2 log_odds + 2/k.
double kstar_equation(double k, double p, double r);
// Unique root on [1e-6, 2 - 1e-9].
KStarSolution solve_kstar(double p, double r);
// c* with k(c*) = k*, i.e. c* = -2 log(sqrt(pi)(1/k* - 1/2)).
double cstar_from_kstar(double k_star);

// (1/k* - 1/2) / log n. n >= 3.
double fpp_type2_asymptotic(double p, double r, std::size_t n);

struct ThresholdSolution {
    double p = 0.0;
    double residual = 0.0;  // fpp_adaptive_asymptotic(p) - target
};

// Threshold p at which fpp_adaptive_asymptotic equals target_fpp. The FPP is
// strictly decreasing in p on the interval where its denominator is
// positive; targets outside its range raise DomainError.
ThresholdSolution threshold_for_fpp(double target_fpp, double r, std::size_t n);

}  // namespace eqc
