#include "eqc/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqc/errors.hpp"
#include "eqc/numeric.hpp"

namespace eqc {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

void check_probability(double v, const char* name, const char* where) {
    if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream msg;
        msg << where << ": " << name << " must lie in (0, 1), got " << v;
        throw ParameterError(msg.str());
    }
}

void require_n(std::size_t n, std::size_t minimum, const char* where) {
    if (n < minimum) {
        std::ostringstream msg;
        msg << where << ": requires n >= " << minimum << ", got " << n;
        throw ParameterError(msg.str());
    }
}

double log_odds_of(double p, double r) { return std::log(p) - std::log1p(-p) - std::log1p(-r); }

// 2 log n + log log n
double log_scale(std::size_t n) {
    const double ln = std::log(static_cast<double>(n));
    return 2.0 * ln + std::log(ln);
}

// e^{-1/2} sqrt(2/pi)
const double kAdaptiveLead = std::exp(-0.5) * std::sqrt(2.0 / numeric::kPi);

}  // namespace

AdaptiveConfig::AdaptiveConfig(double p, double r, double rho, std::size_t n)
    : p_(p), r_(r), rho_(rho), n_(n) {
    check_probability(p, "p", "AdaptiveConfig");
    check_probability(r, "r", "AdaptiveConfig");
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("AdaptiveConfig: rho must lie in [0, 1)");
    require_n(n, 2, "AdaptiveConfig");
    log_odds_ = log_odds_of(p, r);
    c_tau_ = 2.0 * log_odds_ + kLog2 + 1.0;
}

double tau2_max_fpp(const AdaptiveConfig& cfg) {
    return (1.0 - cfg.rho()) * (log_scale(cfg.n()) + 2.0 * cfg.log_odds() + kLog2);
}

bool tau2_max_fpp_warning(std::size_t n) { return n <= 2; }

double fpp_adaptive_asymptotic(const AdaptiveConfig& cfg) {
    require_n(cfg.n(), 3, "fpp_adaptive_asymptotic");
    const double denominator = log_scale(cfg.n()) + cfg.c_tau();
    if (!(denominator > 0.0)) {
        std::ostringstream msg;
        msg << "fpp_adaptive_asymptotic: 2 log n + log log n + c_tau = " << denominator
            << " is not positive";
        throw DomainError(msg.str());
    }
    return kAdaptiveLead * std::exp(-cfg.log_odds()) / denominator;
}

MarginalLikelihood::MarginalLikelihood(std::span<const double> x, const ModelSpec& spec) {
    if (spec.n() < 2) throw ParameterError("marginal likelihood: requires n >= 2");
    check_observation(x, spec);
    const auto coeffs = sigma_coeffs(spec);
    a_ = coeffs.a;
    const double shift = coeffs.b * static_cast<double>(spec.n()) * mean_of(x);
    const double inv = 1.0 / (1.0 - spec.rho());
    squares_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = x[i] * inv + shift;
        squares_[i] = s * s;
        max_square_ = std::max(max_square_, squares_[i]);
    }
}

double MarginalLikelihood::operator()(double tau2) const {
    if (!(tau2 >= 0.0)) throw ParameterError("marginal likelihood: tau2 must be >= 0");
    if (tau2 == 0.0) return 0.0;
    const double one_plus = 1.0 + tau2 * a_;
    const double coef = tau2 / (2.0 * one_plus);
    const double top = coef * max_square_;
    double sum = 0.0;
    for (double sq : squares_) sum += std::exp(coef * sq - top);
    return -std::log(static_cast<double>(squares_.size())) - 0.5 * std::log(one_plus) + top +
           std::log(sum);
}

double marginal_log_likelihood(double tau2, std::span<const double> x, const ModelSpec& spec) {
    return MarginalLikelihood(x, spec)(tau2);
}

double weighted_marginal_log_likelihood(double tau2, std::span<const double> x,
                                        const ModelSpec& spec, double r) {
    check_probability(r, "r", "weighted_marginal_log_likelihood");
    const double log_l = marginal_log_likelihood(tau2, x, spec);
    const double terms[2] = {std::log(r), std::log1p(-r) + log_l};
    return numeric::log_sum_exp(terms);
}

double marginal_log_likelihood_z_form(double tau2, std::span<const double> x,
                                      const ModelSpec& spec) {
    if (!(tau2 >= 0.0)) throw ParameterError("marginal likelihood: tau2 must be >= 0");
    const auto z = z_transform(x, spec);
    const double spread = 1.0 - spec.rho() + tau2;
    const double coef = tau2 / (2.0 * spread);
    std::vector<double> exponents(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) exponents[i] = coef * z[i] * z[i];
    return -std::log(static_cast<double>(z.size())) - 0.5 * std::log(spread / (1.0 - spec.rho())) +
           numeric::log_sum_exp(exponents);
}

double type2_tau2_upper(const ModelSpec& spec) {
    const double n = static_cast<double>(std::max<std::size_t>(spec.n(), 3));
    return 10.0 * (1.0 - spec.rho()) * (2.0 * std::log(n) + std::log(std::log(n)) + 20.0);
}

Type2Estimate type2_mle_tau2(std::span<const double> x, const ModelSpec& spec) {
    const MarginalLikelihood lik(x, spec);
    const double u_max = std::log1p(type2_tau2_upper(spec));
    constexpr std::size_t kScan = 64;

    auto at_u = [&](double u) { return lik(std::expm1(u)); };
    std::vector<double> grid(kScan);
    std::size_t best = 0;
    for (std::size_t k = 0; k < kScan; ++k) {
        grid[k] = at_u(u_max * static_cast<double>(k) / (kScan - 1));
        if (grid[k] > grid[best]) best = k;
    }
    const double step = u_max / (kScan - 1);
    const double lo = best == 0 ? 0.0 : step * static_cast<double>(best - 1);
    const double hi = best + 1 == kScan ? u_max : step * static_cast<double>(best + 1);

    const auto refined = numeric::minimize_bracketed([&](double u) { return -at_u(u); }, lo, hi);
    Type2Estimate out;
    double u_best = step * static_cast<double>(best);
    double value = grid[best];
    if (-refined.value > value) {
        u_best = refined.x;
        value = -refined.value;
    }
    // The endpoint itself is a candidate; Brent never evaluates it exactly.
    if (best == 0 && grid[0] >= value) {
        u_best = 0.0;
        value = grid[0];
    }
    out.tau2 = std::expm1(u_best);
    out.log_likelihood = value;
    out.at_boundary = out.tau2 == 0.0;
    return out;
}

double k_of_c(double c, KForm form) {
    const double tail = std::exp(-0.5 * c) / std::sqrt(numeric::kPi);
    return form == KForm::derivation ? 1.0 / (0.5 + tail) : 1.0 / (1.0 + 2.0 * tail);
}

double kstar_equation(double k, double p, double r) {
    const double lhs = -2.0 * std::log(std::sqrt(numeric::kPi) * (1.0 / k - 0.5));
    const double rhs = std::log(k) + 2.0 * log_odds_of(p, r) + 2.0 / k;
    return lhs - rhs;
}

KStarSolution solve_kstar(double p, double r) {
    check_probability(p, "p", "solve_kstar");
    check_probability(r, "r", "solve_kstar");
    const auto root = numeric::find_root([&](double k) { return kstar_equation(k, p, r); }, 1e-6,
                                         2.0 - 1e-9);
    return {root.x, std::abs(kstar_equation(root.x, p, r))};
}

double cstar_from_kstar(double k_star) {
    if (!(k_star > 0.0 && k_star < 2.0)) throw DomainError("cstar_from_kstar: k* must lie in (0, 2)");
    return -2.0 * std::log(std::sqrt(numeric::kPi) * (1.0 / k_star - 0.5));
}

double fpp_type2_asymptotic(double p, double r, std::size_t n) {
    require_n(n, 3, "fpp_type2_asymptotic");
    const auto sol = solve_kstar(p, r);
    return (1.0 / sol.k_star - 0.5) / std::log(static_cast<double>(n));
}

ThresholdSolution threshold_for_fpp(double target_fpp, double r, std::size_t n) {
    check_probability(target_fpp, "target fpp", "threshold_for_fpp");
    check_probability(r, "r", "threshold_for_fpp");
    require_n(n, 3, "threshold_for_fpp");

    // In q = log(p/((1-p)(1-r))) the formula reads lead e^{-q} / (D + 2q),
    // decreasing on q > -D/2 from +inf to 0.
    const double d = log_scale(n) + kLog2 + 1.0;
    const double log_target = std::log(target_fpp);
    auto excess = [&](double q) {
        return std::log(kAdaptiveLead) - q - std::log(d + 2.0 * q) - log_target;
    };
    const double q_floor = -0.5 * d;
    double lo = q_floor + 1e-12 * std::max(1.0, std::abs(q_floor));
    double hi = std::max(lo + 1.0, 0.0);
    while (excess(hi) > 0.0) {
        lo = hi;
        hi = 2.0 * hi + 1.0;
        if (hi > 700.0) break;
    }
    auto to_p = [&](double q) { return 1.0 / (1.0 + std::exp(-(q + std::log1p(-r)))); };
    const double p_at_hi = to_p(hi);
    if (excess(hi) > 0.0 || !(p_at_hi < 1.0)) {
        std::ostringstream msg;
        msg << "threshold_for_fpp: target " << target_fpp
            << " is below the smallest FPP reachable with p < 1 in double precision";
        throw DomainError(msg.str());
    }
    const auto root = numeric::find_root(excess, lo, hi);
    ThresholdSolution out;
    out.p = to_p(root.x);
    if (!(out.p > 0.0 && out.p < 1.0)) {
        std::ostringstream msg;
        msg << "threshold_for_fpp: target " << target_fpp
            << " needs p outside (0, 1) in double precision; reachable FPP values lie in ("
            << fpp_adaptive_asymptotic(AdaptiveConfig(std::nextafter(1.0, 0.0), r, 0.0, n))
            << ", +inf)";
        throw DomainError(msg.str());
    }
    out.residual = fpp_adaptive_asymptotic(AdaptiveConfig(out.p, r, 0.0, n)) - target_fpp;
    return out;
}

}  // namespace eqc
