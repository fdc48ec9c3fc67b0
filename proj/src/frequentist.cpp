#include "eqc/frequentist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eqc/errors.hpp"
#include "eqc/numeric.hpp"
#include "eqc/parallel.hpp"
#include "eqc/random.hpp"

namespace eqc {

namespace {

constexpr std::size_t kFirstNodes = 64;
constexpr std::size_t kMaxNodes = 1024;
constexpr double kNodeTolerance = 1e-12;

void check_alpha(double alpha, const char* where) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream msg;
        msg << where << ": alpha must lie in (0, 1), got " << alpha;
        throw ParameterError(msg.str());
    }
}

// Probability that at least one |X_j| exceeds c given the common factor.
double conditional_exceedance(double c, double common, double scale, double n) {
    const double lower = (-c - common) / scale;
    const double upper = (c - common) / scale;
    const double outside = numeric::normal_cdf(lower) + numeric::normal_sf(upper);
    if (outside >= 1.0) return 1.0;
    return -std::expm1(n * std::log1p(-outside));
}

// Adaptive Gauss-Kronrod on pieces split around the two places where the
// integrand switches from ~0 to ~1 (needed when sqrt(1 - rho) is tiny).
double split_quadrature(double c, double root_rho, double scale, double n) {
    const double edge = c / root_rho;
    const double width = scale / root_rho;
    std::vector<double> cuts{-12.0, 0.0, 12.0};
    for (double centre : {-edge, edge}) {
        for (double offset : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
            offset *= width;
            const double t = centre + offset;
            if (t > -12.0 && t < 12.0) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double z) {
        return numeric::normal_pdf(z) * conditional_exceedance(c, root_rho * z, scale, n);
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, cuts[k], cuts[k + 1], 10, 1e-13);
    }
    return total;
}

}  // namespace

const char* to_string(TestMethod method) {
    return method == TestMethod::adhoc ? "adhoc" : "lrt";
}

AlphaEvaluation adhoc_alpha_detailed(double c, const ModelSpec& spec) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("adhoc_alpha: c must be finite and >= 0");
    const double n = static_cast<double>(spec.n());
    const double rho = spec.rho();
    const double scale = std::sqrt(1.0 - rho);
    const double root_rho = std::sqrt(rho);

    AlphaEvaluation out;
    if (rho == 0.0) {
        out.alpha = conditional_exceedance(c, 0.0, 1.0, n);
        return out;
    }

    double previous = 0.0;
    for (std::size_t nodes = kFirstNodes; nodes <= kMaxNodes; nodes *= 2) {
        const auto& rule = numeric::gauss_hermite(nodes);
        const double value = numeric::expect_standard_normal(
            rule, [&](double z) { return conditional_exceedance(c, root_rho * z, scale, n); });
        out.hermite_nodes = nodes;
        if (nodes > kFirstNodes && std::abs(value - previous) < kNodeTolerance) {
            out.alpha = value;
            return out;
        }
        previous = value;
    }
    out.alpha = split_quadrature(c, root_rho, scale, n);
    out.used_split_quadrature = true;
    return out;
}

double adhoc_alpha(double c, const ModelSpec& spec) { return adhoc_alpha_detailed(c, spec).alpha; }

CriticalValue adhoc_critical_value(double alpha, const ModelSpec& spec) {
    check_alpha(alpha, "adhoc_critical_value");
    const auto root =
        numeric::find_root([&](double c) { return adhoc_alpha(c, spec) - alpha; }, 0.0, 10.0);
    CriticalValue out;
    out.c = root.x;
    out.alpha = adhoc_alpha(root.x, spec);
    out.method = TestMethod::adhoc;
    if (std::abs(out.alpha - alpha) > 1e-9) {
        std::ostringstream msg;
        msg << "adhoc_critical_value: attained alpha " << out.alpha << " misses target " << alpha
            << " at c = " << out.c;
        throw NumericalError(msg.str());
    }
    return out;
}

RhoLimits adhoc_rho_limits(double alpha, std::size_t n) {
    check_alpha(alpha, "adhoc_rho_limits");
    if (n < 1) throw ParameterError("adhoc_rho_limits: n must be >= 1");
    RhoLimits out;
    out.phi_c_at_rho0 = 0.5 * (1.0 + std::exp(std::log1p(-alpha) / static_cast<double>(n)));
    out.phi_c_at_rho1 = 1.0 - 0.5 * alpha;
    return out;
}

namespace {

struct Bracket {
    double value;
    std::size_t index;
};

// Largest squared bracket and where it occurs.
Bracket max_bracket(std::span<const double> x, const ModelSpec& spec) {
    check_observation(x, spec);
    const double n = static_cast<double>(spec.n());
    const double rho = spec.rho();
    const double scale = std::sqrt(1.0 - rho);
    const double xbar = mean_of(x);
    Bracket best{-1.0, 0};
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double b = scale * x[j] + n * rho * (x[j] - xbar) / scale;
        const double sq = b * b;
        if (sq > best.value) best = {sq, j};
    }
    return best;
}

}  // namespace

double lrt_statistic(std::span<const double> x, const ModelSpec& spec) {
    return max_bracket(x, spec).value;
}

std::size_t lrt_argmax(std::span<const double> x, const ModelSpec& spec) {
    return max_bracket(x, spec).index;
}

double lrt_log_likelihood_ratio(std::span<const double> x, const ModelSpec& spec) {
    const double n = static_cast<double>(spec.n());
    const double rho = spec.rho();
    const double k = (1.0 + (n - 1.0) * rho) * (1.0 + (n - 2.0) * rho);
    return -lrt_statistic(x, spec) / (2.0 * k);
}

CriticalValue lrt_critical_value(double alpha, const ModelSpec& spec, std::size_t reps,
                                 std::uint64_t seed, std::size_t workers) {
    check_alpha(alpha, "lrt_critical_value");
    if (reps < 10000) throw ParameterError("lrt_critical_value: reps must be >= 10000");
    if (workers == 0) workers = default_worker_count();

    const auto truth = TruthScenario::null_model();
    auto chunks = map_chunks(reps, 4096, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> stats;
        stats.reserve(end - begin);
        Observation x(spec.n());
        for (std::size_t rep = begin; rep < end; ++rep) {
            RandomStream rng(seed, rep);
            sample_into(truth, spec, rng, x);
            stats.push_back(lrt_statistic(x, spec));
        }
        return stats;
    });
    std::vector<double> stats;
    stats.reserve(reps);
    for (auto& chunk : chunks) stats.insert(stats.end(), chunk.begin(), chunk.end());

    const auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps)));
    const std::size_t pos = std::clamp<std::size_t>(rank, 1, reps) - 1;

    std::vector<double> sorted = stats;
    std::sort(sorted.begin(), sorted.end());
    CriticalValue out;
    out.method = TestMethod::lrt;
    out.c = sorted[pos];
    out.reps = reps;
    const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), out.c));
    out.alpha = above / static_cast<double>(reps);
    out.precision_warning = static_cast<double>(reps) * alpha < 100.0;

    constexpr std::size_t kBootstrap = 200;
    RandomStream boot(seed, {~std::uint64_t{0}, 0});
    std::uniform_int_distribution<std::size_t> pick(0, reps - 1);
    std::vector<double> resample(reps);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t b = 0; b < kBootstrap; ++b) {
        for (auto& v : resample) v = stats[pick(boot.engine())];
        std::nth_element(resample.begin(), resample.begin() + static_cast<std::ptrdiff_t>(pos),
                         resample.end());
        const double q = resample[pos];
        sum += q;
        sum_sq += q * q;
    }
    const double mean = sum / kBootstrap;
    out.c_stderr = std::sqrt(std::max(0.0, (sum_sq - kBootstrap * mean * mean) / (kBootstrap - 1)));
    return out;
}

}  // namespace eqc
