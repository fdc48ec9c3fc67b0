#pragma once

// Replicated Monte Carlo experiments. Replicate k of grid point g always draws
// from RandomStream(master_seed, {g, k}); replicates are processed in fixed
// chunks whose partial sums are folded in chunk order, so results do not
// depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqc/csv.hpp"
#include "eqc/model.hpp"

namespace eqc {

enum class Experiment {
    fpp,
    power_curve,
    ratio_convergence,
    null_posterior_convergence,
    tau_sweep,
    threshold_curve,
    info_growth,
};

enum class TauMode { fixed, adaptive_max_fpp, type2_mle };

// d_n schedules for the growing-information model, sigma_n^2 = d_n / log n.
enum class DSchedule {
    constant,    // d_n = d
    inv_loglog,  // d_n = 1 / log log n
    sqrt_log,    // d_n = sqrt(log n)
};

std::string to_string(Experiment e);
std::string to_string(TauMode m);
std::string to_string(DSchedule s);
std::optional<Experiment> parse_experiment(const std::string& s);
std::optional<TauMode> parse_tau_mode(const std::string& s);
std::optional<DSchedule> parse_d_schedule(const std::string& s);

double d_schedule_value(DSchedule schedule, double d, std::size_t n);

struct ExperimentConfig {
    Experiment experiment = Experiment::fpp;
    std::vector<std::size_t> n_values;
    std::vector<double> rho_values{0.0};
    double r = 0.5;
    std::vector<double> tau2_values{1.0};  // used when tau_mode = fixed
    double p = 0.5;
    TauMode tau_mode = TauMode::fixed;
    std::vector<double> theta_values{1.0};  // power_curve, info_growth
    std::size_t truth_index = 1;            // info_growth: 0 = null, j >= 1 = M_j
    std::vector<DSchedule> d_schedules{DSchedule::constant};
    double d = 1.0;
    double target_fpp = 0.05;  // threshold_curve
    std::size_t reps = 10000;
    std::uint64_t master_seed = 1;
    std::size_t workers = 0;  // 0 = default_worker_count()

    // Throws ParameterError on an inconsistent configuration.
    void validate() const;
};

struct BinomialEstimate {
    double estimate = 0.0;
    double stderr_value = 0.0;  // sqrt(estimate (1 - estimate) / reps)
    std::size_t reps = 0;
    double mean_tau2 = 0.0;
};

struct MeanEstimate {
    double mean = 0.0;
    double stderr_value = 0.0;
    std::size_t reps = 0;
};

// tau2 used for one replicate. Returns 0 when the rule gives a negative value.
double select_tau2(TauMode mode, double fixed_tau2, std::span<const double> x, const ModelSpec& spec,
                   double r, double p);

// Fraction of null replicates in which some alternative is accepted at p.
BinomialEstimate simulate_fpp(const ModelSpec& spec, double r, TauMode mode, double fixed_tau2,
                              double p, std::size_t reps, std::uint64_t seed,
                              std::uint64_t grid_index, std::size_t workers = 0);

// Fraction of replicates drawn under M1 with signal theta in which M1 is
// accepted at p.
BinomialEstimate simulate_power(const ModelSpec& spec, double r, TauMode mode, double fixed_tau2,
                                double p, double theta, std::size_t reps, std::uint64_t seed,
                                std::uint64_t grid_index, std::size_t workers = 0);

// Mean posterior mass of the true model in the rescaled growing-information
// model X* = X / sigma_n with prior tau2 / sigma_n^2, sigma_n^2 = d_n / log n.
MeanEstimate simulate_info_growth(const ModelSpec& spec, double r, double tau2, double d_n,
                                  const TruthScenario& truth, std::size_t reps, std::uint64_t seed,
                                  std::uint64_t grid_index, std::size_t workers = 0);

std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg);

}  // namespace eqc
