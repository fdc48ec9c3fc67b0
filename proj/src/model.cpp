#include "eqc/model.hpp"

#include <cmath>
#include <sstream>

#include "eqc/errors.hpp"

namespace eqc {

ModelSpec::ModelSpec(std::size_t n, double rho) : n_(n), rho_(rho) {
    if (n < 1) throw ParameterError("ModelSpec: n must be >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) {
        std::ostringstream msg;
        msg << "ModelSpec: rho must lie in [0, 1), got " << rho;
        throw ParameterError(msg.str());
    }
}

PriorSpec::PriorSpec(double r, double tau2) : r_(r), tau2_(tau2) {
    if (!(r > 0.0 && r < 1.0)) {
        std::ostringstream msg;
        msg << "PriorSpec: r must lie in (0, 1), got " << r;
        throw ParameterError(msg.str());
    }
    if (!(tau2 >= 0.0) || !std::isfinite(tau2)) {
        std::ostringstream msg;
        msg << "PriorSpec: tau2 must be finite and >= 0, got " << tau2;
        throw ParameterError(msg.str());
    }
}

TruthScenario TruthScenario::alternative(std::size_t model_index, double theta) {
    if (model_index == 0) throw ParameterError("TruthScenario: alternative index must be >= 1");
    if (!std::isfinite(theta)) throw ParameterError("TruthScenario: theta must be finite");
    return TruthScenario(model_index, theta);
}

void check_observation(std::span<const double> x, const ModelSpec& spec) {
    if (x.size() != spec.n()) {
        std::ostringstream msg;
        msg << "observation length " << x.size() << " does not match n = " << spec.n();
        throw ParameterError(msg.str());
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw ParameterError("observation contains a non-finite entry");
    }
}

double mean_of(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return x.empty() ? 0.0 : sum / static_cast<double>(x.size());
}

void sample_into(const TruthScenario& truth, const ModelSpec& spec, RandomStream& rng,
                 std::span<double> out) {
    if (out.size() != spec.n()) throw ParameterError("sample_into: output length must equal n");
    if (truth.model_index() > spec.n()) throw ParameterError("sample: model index exceeds n");
    const double common_scale = std::sqrt(spec.rho());
    const double own_scale = std::sqrt(1.0 - spec.rho());
    const double common = common_scale * rng.normal();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = common + own_scale * rng.normal();
    if (truth.model_index() != 0) out[truth.model_index() - 1] += truth.theta();
}

Observation sample(const TruthScenario& truth, const ModelSpec& spec, RandomStream& rng) {
    Observation x(spec.n());
    sample_into(truth, spec, rng, x);
    return x;
}

std::vector<double> z_transform(std::span<const double> x, const ModelSpec& spec) {
    check_observation(x, spec);
    const double xbar = mean_of(x);
    const double scale = 1.0 / std::sqrt(1.0 - spec.rho());
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - xbar) * scale;
    return z;
}

SigmaCoeffs sigma_coeffs(const ModelSpec& spec) {
    if (spec.n() == 1) return {1.0, 0.0};
    const double n = static_cast<double>(spec.n());
    const double rho = spec.rho();
    const double denom = (1.0 + (n - 1.0) * rho) * (1.0 - rho);
    return {(1.0 + (n - 2.0) * rho) / denom, -rho / denom};
}

}  // namespace eqc
