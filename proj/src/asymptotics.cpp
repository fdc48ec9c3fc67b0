#include "eqc/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "eqc/errors.hpp"
#include "eqc/numeric.hpp"

namespace eqc {

namespace {

void check_p(double p, const char* where) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream msg;
        msg << where << ": p must lie in (0, 1), got " << p;
        throw ParameterError(msg.str());
    }
}

void require_positive_tau2(const PriorSpec& prior, const char* where) {
    if (!(prior.tau2() > 0.0)) {
        std::ostringstream msg;
        msg << where << ": tau2 must be > 0 (no alternative is ever accepted at tau2 = 0)";
        throw DomainError(msg.str());
    }
}

}  // namespace

double fpp_fixed_tau_exponent(const ModelSpec& spec, const PriorSpec& prior) {
    require_positive_tau2(prior, "fpp_fixed_tau_exponent");
    return (1.0 - spec.rho()) / prior.tau2();
}

double fpp_fixed_tau_rate(const ModelSpec& spec, const PriorSpec& prior, double p,
                          FppConstant constant) {
    require_positive_tau2(prior, "fpp_fixed_tau_rate");
    check_p(p, "fpp_fixed_tau_rate");
    const double n = static_cast<double>(spec.n());
    const double rho = spec.rho();
    const double tau2 = prior.tau2();
    const double r = prior.r();
    const double x = (1.0 - rho) / tau2;
    const double spread = 1.0 - rho + tau2;

    const double log_bracket = std::log(n) - std::log1p(-r) + std::log(p) - std::log1p(-p) +
                               0.5 * std::log(spread / (1.0 - rho));
    if (!(log_bracket > 0.0)) {
        std::ostringstream msg;
        msg << "fpp_fixed_tau_rate: logarithmic factor " << log_bracket << " is not positive at n = "
            << spec.n();
        throw DomainError(msg.str());
    }
    double log_value = -x * std::log(n) + 0.5 * std::log(tau2) - 0.5 * std::log(numeric::kPi) -
                       (1.0 + 0.5 * x) * std::log(spread) +
                       (1.0 + x) * (std::log1p(-r) + std::log1p(-p) - std::log(p)) -
                       0.5 * std::log(log_bracket);
    if (constant == FppConstant::derivation) log_value += 0.5 * (1.0 + x) * std::log1p(-rho);
    return std::exp(log_value);
}

double detection_boundary(const ModelSpec& spec, const PriorSpec& prior, double p) {
    require_positive_tau2(prior, "detection_boundary");
    check_p(p, "detection_boundary");
    const double rho = spec.rho();
    const double tau2 = prior.tau2();
    const double spread = 1.0 - rho + tau2;
    const double log_term = std::log(static_cast<double>(spec.n())) - std::log1p(-prior.r()) +
                            std::log(p) - std::log1p(-p) + 0.5 * std::log(spread / (1.0 - rho));
    return 2.0 * (spread / tau2) * log_term;
}

double null_posterior_limit(const PriorSpec& prior) { return prior.r(); }

double rho1_posterior_limit_n2(std::span<const double> x, std::size_t i) {
    if (x.size() != 2) throw ParameterError("rho1_posterior_limit_n2: requires n = 2");
    if (i != 1 && i != 2) throw ParameterError("rho1_posterior_limit_n2: i must be 1 or 2");
    const double own = x[i - 1];
    const double other = x[2 - i];
    return 1.0 / (1.0 + std::exp(-0.5 * (own * own - other * other)));
}

TailBounds normal_tail_bounds(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("normal_tail_bounds: t must be > 0");
    TailBounds out;
    const double log_phi = numeric::normal_log_pdf(t);
    out.log_upper = log_phi - std::log(t);
    out.log_lower = log_phi + std::log(t) - std::log1p(t * t);
    out.upper = std::exp(out.log_upper);
    out.lower = std::exp(out.log_lower);
    out.asymptotic = out.upper;
    return out;
}

double info_growth_phi_argument(double d, double rho, double tau2, PhiArgument form) {
    if (!(d > 0.0) || !(tau2 > 0.0)) throw ParameterError("info growth: d and tau2 must be > 0");
    const double ratio = (1.0 - rho) * d / tau2;
    return form == PhiArgument::statement ? ratio : std::sqrt(2.0 * ratio);
}

InfoGrowthLimit info_growth_limit(const InfoGrowthSpec& igs, const ModelSpec& spec,
                                  const PriorSpec& prior, const TruthScenario& truth,
                                  PhiArgument form) {
    if (truth.model_index() > spec.n()) throw ParameterError("info_growth_limit: model index exceeds n");
    using Kind = InfoGrowthLimit::Kind;
    InfoGrowthLimit out;
    out.model_index = truth.model_index();
    switch (igs.regime) {
        case InfoRegime::d_to_zero:
            out.kind = Kind::consistent;
            out.value = 1.0;
            return out;
        case InfoRegime::d_to_infinity:
            if (truth.model_index() == 0) {
                out.kind = Kind::limit_value;
                out.value = prior.r();
            } else {
                out.kind = Kind::not_consistent;
            }
            return out;
        case InfoRegime::d_finite:
            break;
    }
    if (!(igs.d > 0.0)) throw ParameterError("info_growth_limit: finite regime needs d > 0");
    if (truth.model_index() == 0) {
        require_positive_tau2(prior, "info_growth_limit");
        const double g = info_growth_phi_argument(igs.d, spec.rho(), prior.tau2(), form);
        const double r = prior.r();
        out.kind = Kind::limit_value;
        out.value = 1.0 / (1.0 + (1.0 - r) / r * (2.0 * numeric::normal_cdf(g) - 1.0));
        return out;
    }
    const double edge = truth.theta() * truth.theta() / (2.0 * (1.0 - spec.rho()));
    if (std::abs(igs.d - edge) <= 1e-12 * edge) {
        out.kind = Kind::indeterminate;
    } else if (igs.d < edge) {
        out.kind = Kind::consistent;
        out.value = 1.0;
    } else {
        out.kind = Kind::not_consistent;
    }
    return out;
}

std::string to_string(InfoGrowthLimit::Kind kind) {
    switch (kind) {
        case InfoGrowthLimit::Kind::consistent:
            return "consistent";
        case InfoGrowthLimit::Kind::limit_value:
            return "limit_value";
        case InfoGrowthLimit::Kind::not_consistent:
            return "not_consistent";
        case InfoGrowthLimit::Kind::indeterminate:
            return "indeterminate";
    }
    return "unknown";
}

}  // namespace eqc
