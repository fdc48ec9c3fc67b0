#include "eqc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eqc/adaptive.hpp"
#include "eqc/asymptotics.hpp"
#include "eqc/bayes.hpp"
#include "eqc/errors.hpp"
#include "eqc/parallel.hpp"
#include "eqc/random.hpp"

namespace eqc {

namespace {

constexpr std::size_t kChunk = 64;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Tally {
    std::size_t hits = 0;
    double tau2_sum = 0.0;
};

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

std::size_t resolve_workers(std::size_t workers) {
    return workers == 0 ? default_worker_count() : workers;
}

BinomialEstimate fold(const std::vector<Tally>& parts, std::size_t reps) {
    Tally total;
    for (const auto& t : parts) {
        total.hits += t.hits;
        total.tau2_sum += t.tau2_sum;
    }
    BinomialEstimate out;
    out.reps = reps;
    out.estimate = static_cast<double>(total.hits) / static_cast<double>(reps);
    out.stderr_value = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(reps));
    out.mean_tau2 = total.tau2_sum / static_cast<double>(reps);
    return out;
}

MeanEstimate fold(const std::vector<Moments>& parts, std::size_t reps) {
    Moments total;
    for (const auto& m : parts) {
        total.sum += m.sum;
        total.sum_sq += m.sum_sq;
    }
    MeanEstimate out;
    out.reps = reps;
    const double k = static_cast<double>(reps);
    out.mean = total.sum / k;
    if (reps > 1) {
        const double var = std::max(0.0, (total.sum_sq - k * out.mean * out.mean) / (k - 1.0));
        out.stderr_value = std::sqrt(var / k);
    }
    return out;
}

// Runs `decide_one(x, rng)` for every replicate and counts the `true`s.
template <class Fn>
BinomialEstimate count_replicates(const ModelSpec& spec, const TruthScenario& truth,
                                  std::size_t reps, std::uint64_t seed, std::uint64_t grid_index,
                                  std::size_t workers, Fn&& accept) {
    if (reps == 0) throw ParameterError("simulation: reps must be >= 1");
    auto parts = map_chunks(reps, kChunk, resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        Tally tally;
        Observation x(spec.n());
        std::vector<double> scratch;
        for (std::size_t rep = begin; rep < end; ++rep) {
            RandomStream rng(seed, {grid_index, rep});
            sample_into(truth, spec, rng, x);
            double tau2 = 0.0;
            if (accept(x, scratch, tau2)) ++tally.hits;
            tally.tau2_sum += tau2;
        }
        return tally;
    });
    return fold(parts, reps);
}

double safe_asymptotic_fpp(TauMode mode, const ModelSpec& spec, double r, double tau2, double p) {
    try {
        switch (mode) {
            case TauMode::fixed:
                return fpp_fixed_tau_rate(spec, PriorSpec(r, tau2), p);
            case TauMode::adaptive_max_fpp:
                return fpp_adaptive_asymptotic(AdaptiveConfig(p, r, spec.rho(), spec.n()));
            case TauMode::type2_mle:
                return fpp_type2_asymptotic(p, r, spec.n());
        }
    } catch (const ParameterError&) {
    } catch (const DomainError&) {
    }
    return kNaN;
}

std::string series(const std::string& name) { return "series=" + name; }

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::fpp: return "fpp";
        case Experiment::power_curve: return "power_curve";
        case Experiment::ratio_convergence: return "ratio_convergence";
        case Experiment::null_posterior_convergence: return "null_posterior_convergence";
        case Experiment::tau_sweep: return "tau_sweep";
        case Experiment::threshold_curve: return "threshold_curve";
        case Experiment::info_growth: return "info_growth";
    }
    return "unknown";
}

std::string to_string(TauMode m) {
    switch (m) {
        case TauMode::fixed: return "fixed";
        case TauMode::adaptive_max_fpp: return "adaptive_max_fpp";
        case TauMode::type2_mle: return "type2_mle";
    }
    return "unknown";
}

std::string to_string(DSchedule s) {
    switch (s) {
        case DSchedule::constant: return "constant";
        case DSchedule::inv_loglog: return "inv_loglog";
        case DSchedule::sqrt_log: return "sqrt_log";
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& s) {
    for (auto e : {Experiment::fpp, Experiment::power_curve, Experiment::ratio_convergence,
                   Experiment::null_posterior_convergence, Experiment::tau_sweep,
                   Experiment::threshold_curve, Experiment::info_growth}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

std::optional<TauMode> parse_tau_mode(const std::string& s) {
    for (auto m : {TauMode::fixed, TauMode::adaptive_max_fpp, TauMode::type2_mle}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::optional<DSchedule> parse_d_schedule(const std::string& s) {
    for (auto d : {DSchedule::constant, DSchedule::inv_loglog, DSchedule::sqrt_log}) {
        if (to_string(d) == s) return d;
    }
    return std::nullopt;
}

double d_schedule_value(DSchedule schedule, double d, std::size_t n) {
    const double ln = std::log(static_cast<double>(n));
    switch (schedule) {
        case DSchedule::constant:
            return d;
        case DSchedule::inv_loglog:
            if (n < 16) throw ParameterError("d schedule inv_loglog needs n >= 16");
            return 1.0 / std::log(ln);
        case DSchedule::sqrt_log:
            return std::sqrt(ln);
    }
    return d;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw ParameterError("experiment config: " + what); };
    if (n_values.empty()) fail("n grid is empty");
    for (auto n : n_values) {
        if (n < 2) fail("every n must be >= 2");
    }
    if (rho_values.empty()) fail("rho grid is empty");
    for (double rho : rho_values) {
        if (!(rho >= 0.0 && rho < 1.0)) fail("rho must lie in [0, 1)");
    }
    if (!(r > 0.0 && r < 1.0)) fail("r must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) fail("p must lie in (0, 1)");
    if (reps < 1 && experiment != Experiment::threshold_curve) fail("reps must be >= 1");
    if (tau_mode == TauMode::fixed || experiment == Experiment::info_growth ||
        experiment == Experiment::tau_sweep || experiment == Experiment::ratio_convergence) {
        if (tau2_values.empty()) fail("tau2 grid is empty");
        for (double t : tau2_values) {
            if (!(t >= 0.0) || !std::isfinite(t)) fail("tau2 must be finite and >= 0");
        }
    }
    if (experiment == Experiment::power_curve || experiment == Experiment::info_growth) {
        if (theta_values.empty()) fail("theta grid is empty");
    }
    if (experiment == Experiment::info_growth) {
        if (tau_mode != TauMode::fixed) fail("info_growth needs tau2_mode = fixed");
        if (d_schedules.empty()) fail("d schedule list is empty");
        if (!(d > 0.0)) fail("d must be > 0");
        for (double t : tau2_values) {
            if (!(t > 0.0)) fail("info_growth needs tau2 > 0");
        }
        for (auto n : n_values) {
            if (truth_index > n) fail("truth index exceeds n");
        }
    }
    if (experiment == Experiment::threshold_curve) {
        if (!(target_fpp > 0.0 && target_fpp < 1.0)) fail("target_fpp must lie in (0, 1)");
        for (auto n : n_values) {
            if (n < 3) fail("threshold_curve needs n >= 3");
        }
    }
}

double select_tau2(TauMode mode, double fixed_tau2, std::span<const double> x, const ModelSpec& spec,
                   double r, double p) {
    switch (mode) {
        case TauMode::fixed:
            return fixed_tau2;
        case TauMode::adaptive_max_fpp:
            return std::max(0.0, tau2_max_fpp(AdaptiveConfig(p, r, spec.rho(), spec.n())));
        case TauMode::type2_mle:
            return type2_mle_tau2(x, spec).tau2;
    }
    return fixed_tau2;
}

BinomialEstimate simulate_fpp(const ModelSpec& spec, double r, TauMode mode, double fixed_tau2,
                              double p, std::size_t reps, std::uint64_t seed,
                              std::uint64_t grid_index, std::size_t workers) {
    const double design_tau2 =
        mode == TauMode::type2_mle ? 0.0 : select_tau2(mode, fixed_tau2, {}, spec, r, p);
    return count_replicates(
        spec, TruthScenario::null_model(), reps, seed, grid_index, workers,
        [&](const Observation& x, std::vector<double>& scratch, double& tau2) {
            tau2 = mode == TauMode::type2_mle ? select_tau2(mode, 0.0, x, spec, r, p) : design_tau2;
            return accepted_alternative(x, spec, PriorSpec(r, tau2), p, scratch) != 0;
        });
}

BinomialEstimate simulate_power(const ModelSpec& spec, double r, TauMode mode, double fixed_tau2,
                                double p, double theta, std::size_t reps, std::uint64_t seed,
                                std::uint64_t grid_index, std::size_t workers) {
    const double design_tau2 =
        mode == TauMode::type2_mle ? 0.0 : select_tau2(mode, fixed_tau2, {}, spec, r, p);
    return count_replicates(
        spec, TruthScenario::alternative(1, theta), reps, seed, grid_index, workers,
        [&](const Observation& x, std::vector<double>& scratch, double& tau2) {
            tau2 = mode == TauMode::type2_mle ? select_tau2(mode, 0.0, x, spec, r, p) : design_tau2;
            return accepted_alternative(x, spec, PriorSpec(r, tau2), p, scratch) == 1;
        });
}

MeanEstimate simulate_info_growth(const ModelSpec& spec, double r, double tau2, double d_n,
                                  const TruthScenario& truth, std::size_t reps, std::uint64_t seed,
                                  std::uint64_t grid_index, std::size_t workers) {
    if (reps == 0) throw ParameterError("simulation: reps must be >= 1");
    if (!(d_n > 0.0)) throw ParameterError("simulate_info_growth: d_n must be > 0");
    const double sigma2 = d_n / std::log(static_cast<double>(spec.n()));
    const double sigma = std::sqrt(sigma2);
    const PriorSpec scaled_prior(r, tau2 / sigma2);
    const TruthScenario scaled_truth = truth.model_index() == 0
                                           ? TruthScenario::null_model()
                                           : TruthScenario::alternative(truth.model_index(),
                                                                        truth.theta() / sigma);
    const std::size_t target = truth.model_index();
    auto parts = map_chunks(reps, kChunk, resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        Moments m;
        Observation x(spec.n());
        std::vector<double> probs(spec.n() + 1);
        for (std::size_t rep = begin; rep < end; ++rep) {
            RandomStream rng(seed, {grid_index, rep});
            sample_into(scaled_truth, spec, rng, x);
            posterior_into(x, spec, scaled_prior, probs);
            m.sum += probs[target];
            m.sum_sq += probs[target] * probs[target];
        }
        return m;
    });
    return fold(parts, reps);
}

namespace {

CsvRow base_row(const ExperimentConfig& cfg, std::size_t n, double rho, double tau2, double theta) {
    CsvRow row;
    row.experiment = to_string(cfg.experiment);
    row.n = n;
    row.rho = rho;
    row.r = cfg.r;
    row.tau2_mode = to_string(cfg.tau_mode);
    row.tau2 = tau2;
    row.p = cfg.p;
    row.theta = theta;
    row.seed = cfg.master_seed;
    return row;
}

std::vector<double> fixed_tau_grid(const ExperimentConfig& cfg) {
    return cfg.tau_mode == TauMode::fixed ? cfg.tau2_values : std::vector<double>{kNaN};
}

void run_fpp(const ExperimentConfig& cfg, std::vector<CsvRow>& rows) {
    std::uint64_t grid = 0;
    for (double rho : cfg.rho_values) {
        for (double tau2 : fixed_tau_grid(cfg)) {
            for (auto n : cfg.n_values) {
                const ModelSpec spec(n, rho);
                const auto est = simulate_fpp(spec, cfg.r, cfg.tau_mode, tau2, cfg.p, cfg.reps,
                                              cfg.master_seed, grid++, cfg.workers);
                auto row = base_row(cfg, n, rho, est.mean_tau2, 0.0);
                row.grid_param = series("simulated");
                row.value = est.estimate;
                row.stderr_value = est.stderr_value;
                row.reps = est.reps;
                rows.push_back(row);
                row.grid_param = series("asymptotic");
                row.value = safe_asymptotic_fpp(cfg.tau_mode, spec, cfg.r, est.mean_tau2, cfg.p);
                row.stderr_value = 0.0;
                rows.push_back(row);
            }
        }
    }
}

void run_power(const ExperimentConfig& cfg, std::vector<CsvRow>& rows) {
    std::uint64_t grid = 0;
    for (double rho : cfg.rho_values) {
        for (double tau2 : fixed_tau_grid(cfg)) {
            for (double theta : cfg.theta_values) {
                for (auto n : cfg.n_values) {
                    const ModelSpec spec(n, rho);
                    const auto est = simulate_power(spec, cfg.r, cfg.tau_mode, tau2, cfg.p, theta,
                                                    cfg.reps, cfg.master_seed, grid++, cfg.workers);
                    auto row = base_row(cfg, n, rho, est.mean_tau2, theta);
                    row.grid_param = series("power");
                    row.value = est.estimate;
                    row.stderr_value = est.stderr_value;
                    row.reps = est.reps;
                    rows.push_back(row);
                }
            }
        }
    }
}

// Trajectories along nested prefixes of one long null draw per replicate.
// `measure(prefix, spec, tau2)` returns the tracked quantity.
template <class Measure>
void run_trajectories(const ExperimentConfig& cfg, const std::string& name,
                      std::vector<CsvRow>& rows, Measure&& measure) {
    std::vector<std::size_t> ns = cfg.n_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    const std::size_t n_max = ns.back();
    const bool fixed = cfg.tau_mode == TauMode::fixed;

    std::uint64_t grid = 0;
    for (double rho : cfg.rho_values) {
        for (double tau2_fixed : fixed ? cfg.tau2_values : std::vector<double>{kNaN}) {
            const ModelSpec full(n_max, rho);
            struct Trajectory {
                std::vector<double> values;
                std::vector<double> tau2;
            };
            const std::uint64_t grid_index = grid++;
            auto parts = map_chunks(cfg.reps, 8, resolve_workers(cfg.workers),
                                    [&](std::size_t begin, std::size_t end) {
                std::vector<Trajectory> out;
                Observation x(n_max);
                for (std::size_t rep = begin; rep < end; ++rep) {
                    RandomStream rng(cfg.master_seed, {grid_index, rep});
                    sample_into(TruthScenario::null_model(), full, rng, x);
                    Trajectory t;
                    for (auto n : ns) {
                        const std::span<const double> prefix(x.data(), n);
                        const ModelSpec spec(n, rho);
                        const double tau2 = select_tau2(cfg.tau_mode, tau2_fixed, prefix, spec, cfg.r, cfg.p);
                        t.values.push_back(measure(prefix, spec, tau2));
                        t.tau2.push_back(tau2);
                    }
                    out.push_back(std::move(t));
                }
                return out;
            });
            std::vector<Moments> moments(ns.size());
            std::vector<double> tau2_sums(ns.size(), 0.0);
            std::size_t rep = 0;
            for (const auto& part : parts) {
                for (const auto& t : part) {
                    for (std::size_t k = 0; k < ns.size(); ++k) {
                        auto row = base_row(cfg, ns[k], rho, t.tau2[k], 0.0);
                        row.grid_param = series(name);
                        row.replicate = std::to_string(rep);
                        row.value = t.values[k];
                        row.reps = 1;
                        rows.push_back(row);
                        moments[k].sum += t.values[k];
                        moments[k].sum_sq += t.values[k] * t.values[k];
                        tau2_sums[k] += t.tau2[k];
                    }
                    ++rep;
                }
            }
            for (std::size_t k = 0; k < ns.size(); ++k) {
                const auto est = fold(std::vector<Moments>{moments[k]}, cfg.reps);
                auto row = base_row(cfg, ns[k], rho, tau2_sums[k] / static_cast<double>(cfg.reps), 0.0);
                row.grid_param = series(name + "_mean");
                row.value = est.mean;
                row.stderr_value = est.stderr_value;
                row.reps = est.reps;
                rows.push_back(row);
            }
        }
    }
}

double ratio_measure(std::span<const double> x, const ModelSpec& spec, double tau2, double r) {
    const PriorSpec prior(r, tau2);
    const auto exact = posterior(x, spec, prior);
    const auto approx = posterior_asymptotic(x, spec, prior);
    return approx.probs[1] / exact.probs[1];
}

void run_threshold_curve(const ExperimentConfig& cfg, std::vector<CsvRow>& rows) {
    std::uint64_t grid = 0;
    for (double rho : cfg.rho_values) {
        for (auto n : cfg.n_values) {
            const auto sol = threshold_for_fpp(cfg.target_fpp, cfg.r, n);
            const ModelSpec spec(n, rho);
            const double tau2 = tau2_max_fpp(AdaptiveConfig(sol.p, cfg.r, rho, n));
            auto row = base_row(cfg, n, rho, tau2, 0.0);
            row.tau2_mode = to_string(TauMode::adaptive_max_fpp);
            row.p = sol.p;
            row.grid_param = series("threshold") + ";target_fpp=" + format_double(cfg.target_fpp);
            row.value = sol.p;
            rows.push_back(row);
            if (cfg.reps > 0) {
                const auto est = simulate_fpp(spec, cfg.r, TauMode::adaptive_max_fpp, 0.0, sol.p,
                                              cfg.reps, cfg.master_seed, grid, cfg.workers);
                row.grid_param = series("simulated_fpp") + ";target_fpp=" + format_double(cfg.target_fpp);
                row.value = est.estimate;
                row.stderr_value = est.stderr_value;
                row.reps = est.reps;
                rows.push_back(row);
            }
            ++grid;
        }
    }
}

void run_info_growth(const ExperimentConfig& cfg, std::vector<CsvRow>& rows) {
    std::uint64_t grid = 0;
    const bool null_truth = cfg.truth_index == 0;
    for (double rho : cfg.rho_values) {
        for (double tau2 : cfg.tau2_values) {
            for (double theta : null_truth ? std::vector<double>{0.0} : cfg.theta_values) {
                const auto truth = null_truth ? TruthScenario::null_model()
                                              : TruthScenario::alternative(cfg.truth_index, theta);
                for (auto schedule : cfg.d_schedules) {
                    for (auto n : cfg.n_values) {
                        const ModelSpec spec(n, rho);
                        const double d_n = d_schedule_value(schedule, cfg.d, n);
                        const auto est = simulate_info_growth(spec, cfg.r, tau2, d_n, truth, cfg.reps,
                                                              cfg.master_seed, grid++, cfg.workers);
                        std::ostringstream tag;
                        tag << "schedule=" << to_string(schedule) << ";d_n=" << format_double(d_n)
                            << ";model=" << truth.model_index();
                        auto row = base_row(cfg, n, rho, tau2, theta);
                        row.grid_param = series("simulated") + ";" + tag.str();
                        row.value = est.mean;
                        row.stderr_value = est.stderr_value;
                        row.reps = est.reps;
                        rows.push_back(row);

                        InfoGrowthSpec igs;
                        igs.regime = schedule == DSchedule::constant ? InfoRegime::d_finite
                                     : schedule == DSchedule::inv_loglog ? InfoRegime::d_to_zero
                                                                         : InfoRegime::d_to_infinity;
                        igs.d = cfg.d;
                        const PriorSpec prior(cfg.r, tau2);
                        for (auto form : {PhiArgument::statement, PhiArgument::proof_chain}) {
                            const auto limit = info_growth_limit(igs, spec, prior, truth, form);
                            if (limit.kind != InfoGrowthLimit::Kind::consistent &&
                                limit.kind != InfoGrowthLimit::Kind::limit_value) {
                                continue;
                            }
                            const bool form_matters = null_truth && igs.regime == InfoRegime::d_finite;
                            if (!form_matters && form == PhiArgument::statement) continue;
                            auto lim = row;
                            lim.grid_param = series(form_matters ? (form == PhiArgument::statement
                                                                        ? "limit_statement"
                                                                        : "limit_proof_chain")
                                                                 : "limit") +
                                             ";" + tag.str();
                            lim.value = limit.value;
                            lim.stderr_value = 0.0;
                            rows.push_back(lim);
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<CsvRow> rows;
    switch (cfg.experiment) {
        case Experiment::fpp:
            run_fpp(cfg, rows);
            break;
        case Experiment::power_curve:
            run_power(cfg, rows);
            break;
        case Experiment::ratio_convergence:
        case Experiment::tau_sweep: {
            ExperimentConfig fixed_cfg = cfg;
            fixed_cfg.tau_mode = TauMode::fixed;
            run_trajectories(fixed_cfg, "ratio", rows, [&](auto x, const ModelSpec& spec, double tau2) {
                return ratio_measure(x, spec, tau2, cfg.r);
            });
            for (auto& row : rows) row.experiment = to_string(cfg.experiment);
            break;
        }
        case Experiment::null_posterior_convergence:
            run_trajectories(cfg, "null_posterior", rows, [&](auto x, const ModelSpec& spec, double tau2) {
                return posterior(x, spec, PriorSpec(cfg.r, tau2)).null_prob();
            });
            break;
        case Experiment::threshold_curve:
            run_threshold_curve(cfg, rows);
            break;
        case Experiment::info_growth:
            run_info_growth(cfg, rows);
            break;
    }
    return rows;
}

}  // namespace eqc
