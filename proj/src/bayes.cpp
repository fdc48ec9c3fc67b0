#include "eqc/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqc/errors.hpp"

namespace eqc {

namespace {

void require_two_channels(const ModelSpec& spec, const char* where) {
    if (spec.n() < 2) {
        std::ostringstream msg;
        msg << where << ": requires n >= 2";
        throw ParameterError(msg.str());
    }
}

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream msg;
        msg << "decide: p must lie in (0, 1), got " << p;
        throw ParameterError(msg.str());
    }
}

void fill_prior(std::span<double> out, double r) {
    const double alt = (1.0 - r) / static_cast<double>(out.size() - 1);
    out[0] = r;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = alt;
}

}  // namespace

void posterior_into(std::span<const double> x, const ModelSpec& spec, const PriorSpec& prior,
                    std::span<double> out) {
    require_two_channels(spec, "posterior");
    check_observation(x, spec);
    if (out.size() != spec.n() + 1) throw ParameterError("posterior: output must have length n + 1");

    const double r = prior.r();
    const double tau2 = prior.tau2();
    if (tau2 == 0.0) {
        fill_prior(out, r);
        return;
    }
    const double n = static_cast<double>(spec.n());
    const auto [a, b] = sigma_coeffs(spec);
    const double inv_one_minus_rho = 1.0 / (1.0 - spec.rho());
    const double shift = b * n * mean_of(x);
    const double one_plus = 1.0 + tau2 * a;
    const double coef = tau2 / (2.0 * one_plus);
    const double alt_base = std::log1p(-r) - std::log(n) - 0.5 * std::log(one_plus);

    out[0] = std::log(r);
    double top = out[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = x[i] * inv_one_minus_rho + shift;
        const double w = alt_base + coef * s * s;
        out[i + 1] = w;
        if (w > top) top = w;
    }
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : out) v /= total;
}

PosteriorVector posterior(std::span<const double> x, const ModelSpec& spec, const PriorSpec& prior) {
    require_two_channels(spec, "posterior");
    PosteriorVector post{std::vector<double>(spec.n() + 1)};
    posterior_into(x, spec, prior, post.probs);
    return post;
}

double posterior_exponent(std::span<const double> x, const ModelSpec& spec, double tau2,
                          std::size_t channel) {
    check_observation(x, spec);
    if (channel >= x.size()) throw ParameterError("posterior_exponent: channel out of range");
    const auto [a, b] = sigma_coeffs(spec);
    const double s = x[channel] / (1.0 - spec.rho()) + b * static_cast<double>(spec.n()) * mean_of(x);
    return tau2 * s * s / (2.0 * (1.0 + tau2 * a));
}

PosteriorVector posterior_n2(std::span<const double> x, double rho, const PriorSpec& prior) {
    const ModelSpec spec(2, rho);
    check_observation(x, spec);
    const double r = prior.r();
    const double tau2 = prior.tau2();
    PosteriorVector post{std::vector<double>(3)};
    if (tau2 == 0.0) {
        fill_prior(post.probs, r);
        return post;
    }
    const double one_minus_rho2 = 1.0 - rho * rho;
    const double spread = one_minus_rho2 + tau2;
    const double factor = tau2 / (2.0 * spread);
    const double e1 = factor * std::pow(x[0] - rho * x[1], 2) / one_minus_rho2;
    const double e2 = factor * std::pow(x[1] - rho * x[0], 2) / one_minus_rho2;
    // log of (1-r)/(2r) sqrt((1-rho^2)/(1-rho^2+tau2))
    const double g = std::log1p(-r) - std::log(2.0 * r) + 0.5 * std::log(one_minus_rho2 / spread);

    post.probs[0] = 1.0 / (1.0 + std::exp(g + e1) + std::exp(g + e2));
    const double d12 = factor * (x[0] * x[0] - x[1] * x[1]);
    post.probs[1] = 1.0 / (std::exp(-g - e1) + 1.0 + std::exp(-d12));
    post.probs[2] = 1.0 / (std::exp(-g - e2) + 1.0 + std::exp(d12));
    return post;
}

PosteriorVector posterior_z_form(std::span<const double> x, const ModelSpec& spec,
                                 const PriorSpec& prior) {
    require_two_channels(spec, "posterior_z_form");
    check_observation(x, spec);
    const double r = prior.r();
    const double tau2 = prior.tau2();
    const std::size_t n = spec.n();
    PosteriorVector post{std::vector<double>(n + 1)};
    if (tau2 == 0.0) {
        fill_prior(post.probs, r);
        return post;
    }
    const double nd = static_cast<double>(n);
    const double rho = spec.rho();
    const double lead = 1.0 + (nd - 1.0) * rho;
    const double c = lead / (((1.0 - rho + tau2) * lead - tau2 * rho) * (1.0 - rho));
    const double xbar = mean_of(x);
    const double a = sigma_coeffs(spec).a;

    std::vector<double> half(n);  // tau2 C A_i^2 / 2
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = (x[i] - xbar) + xbar * (1.0 - rho) / lead;
        half[i] = 0.5 * tau2 * c * ai * ai;
    }
    // log of sqrt(1 + tau2 a) n r/(1-r)
    const double log_odds = 0.5 * std::log1p(tau2 * a) + std::log(nd * r) - std::log1p(-r);

    double null_denominator = 1.0;
    for (std::size_t k = 0; k < n; ++k) null_denominator += std::exp(half[k] - log_odds);
    post.probs[0] = 1.0 / null_denominator;
    for (std::size_t i = 0; i < n; ++i) {
        double denominator = std::exp(log_odds - half[i]);
        for (std::size_t k = 0; k < n; ++k) denominator += std::exp(half[k] - half[i]);
        post.probs[i + 1] = 1.0 / denominator;
    }
    return post;
}

PosteriorVector posterior_asymptotic(std::span<const double> x, const ModelSpec& spec,
                                     const PriorSpec& prior) {
    const auto z = z_transform(x, spec);
    const double rho = spec.rho();
    const double tau2 = prior.tau2();
    const double spread = 1.0 - rho + tau2;
    const double log_front = std::log(static_cast<double>(spec.n())) - std::log1p(-prior.r()) +
                             0.5 * std::log(spread / (1.0 - rho));
    const double factor = tau2 / (2.0 * spread);

    PosteriorVector post{std::vector<double>(spec.n() + 1)};
    double alt_total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(log_front - factor * z[i] * z[i]));
        post.probs[i + 1] = p;
        alt_total += p;
    }
    post.probs[0] = std::max(0.0, 1.0 - alt_total);
    return post;
}

Decision decide(std::span<const double> probs, double p) {
    check_p(p);
    if (probs.empty()) throw ParameterError("decide: empty probability vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) best = i;
    }
    Decision d;
    d.threshold_p = p;
    if (probs[best] >= p) d.accepted = best;
    return d;
}

std::size_t accepted_alternative(std::span<const double> x, const ModelSpec& spec,
                                 const PriorSpec& prior, double p, std::vector<double>& scratch) {
    require_two_channels(spec, "accepted_alternative");
    check_observation(x, spec);
    check_p(p);
    scratch.resize(spec.n() + 1);
    if (prior.tau2() > 0.0) {
        // p_i <= exp(w_i - max(w_0, w_i)), so w_max - w_0 < log p rules out
        // every alternative.
        const double n = static_cast<double>(spec.n());
        const auto [a, b] = sigma_coeffs(spec);
        const double inv_one_minus_rho = 1.0 / (1.0 - spec.rho());
        const double shift = b * n * mean_of(x);
        double max_sq = 0.0;
        for (double v : x) {
            const double s = v * inv_one_minus_rho + shift;
            max_sq = std::max(max_sq, s * s);
        }
        const double tau2 = prior.tau2();
        const double one_plus = 1.0 + tau2 * a;
        const double w_max = std::log1p(-prior.r()) - std::log(n) - 0.5 * std::log(one_plus) +
                             tau2 / (2.0 * one_plus) * max_sq;
        if (w_max - std::log(prior.r()) < std::log(p) - 1e-9) return 0;
    }
    posterior_into(x, spec, prior, scratch);
    const auto d = decide(scratch, p);
    return d.false_positive() ? d.accepted : 0;
}

}  // namespace eqc
