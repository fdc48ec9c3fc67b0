#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "eqc/adaptive.hpp"
#include "eqc/asymptotics.hpp"
#include "eqc/bayes.hpp"
#include "eqc/csv.hpp"
#include "eqc/errors.hpp"
#include "eqc/frequentist.hpp"

namespace eqc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Strict numeric parsing in the C locale: the whole token must be consumed.
double to_double(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    double v = 0.0;
    in >> v;
    if (in.fail() || !(in >> std::ws).eof()) throw ParameterError(where + ": expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_unsigned(const std::string& text, const std::string& where) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ParameterError(where + ": expected a non-negative integer, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw ParameterError(where + ": integer out of range: '" + text + "'");
    }
}

void emit(std::ostream& out, const std::string& field, const std::string& value) {
    out << field << ',' << value << '\n';
}

void emit(std::ostream& out, const std::string& field, double value) {
    emit(out, field, format_double(value));
}

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return to_unsigned(env, "SEED environment variable");
}

std::vector<double> parse_vector(const std::string& text, const std::string& where) {
    std::vector<double> values;
    std::string token;
    std::string normalized = text;
    std::replace_if(normalized.begin(), normalized.end(), [](char c) { return c == ',' || c == '\n' || c == '\t'; }, ' ');
    std::istringstream in(normalized);
    while (in >> token) values.push_back(to_double(token, where));
    return values;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    static const std::set<std::string> grid_keys{"n", "rho", "tau2", "theta", "d_schedule"};
    static const std::set<std::string> scalar_keys{"experiment", "r",          "p",    "tau2_mode",
                                                   "truth",      "d",          "target_fpp",
                                                   "reps",       "seed"};
    ExperimentConfig cfg;
    std::map<std::string, std::vector<std::string>> grids;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ParameterError(where + ": key '" + key + "' has no value");
        const std::string at = where + ": " + key;

        if (grid_keys.count(key)) {
            grids[key].push_back(value);
            if (key == "n") {
                const auto n = to_unsigned(value, at);
                grids["n#"].push_back(std::to_string(n));
            } else if (key == "d_schedule") {
                if (!parse_d_schedule(value)) throw ParameterError(at + ": unknown schedule '" + value + "'");
            } else {
                to_double(value, at);
            }
            continue;
        }
        if (!scalar_keys.count(key)) throw ParameterError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ParameterError(where + ": key '" + key + "' given twice");

        if (key == "experiment") {
            const auto e = parse_experiment(value);
            if (!e) throw ParameterError(at + ": unknown experiment '" + value + "'");
            cfg.experiment = *e;
        } else if (key == "tau2_mode") {
            const auto m = parse_tau_mode(value);
            if (!m) throw ParameterError(at + ": unknown tau2 mode '" + value + "'");
            cfg.tau_mode = *m;
        } else if (key == "r") {
            cfg.r = to_double(value, at);
        } else if (key == "p") {
            cfg.p = to_double(value, at);
        } else if (key == "truth") {
            cfg.truth_index = to_unsigned(value, at);
        } else if (key == "d") {
            cfg.d = to_double(value, at);
        } else if (key == "target_fpp") {
            cfg.target_fpp = to_double(value, at);
        } else if (key == "reps") {
            cfg.reps = to_unsigned(value, at);
        } else if (key == "seed") {
            cfg.master_seed = to_unsigned(value, at);
        }
    }
    if (!seen.count("experiment")) throw ParameterError(source + ": missing required key 'experiment'");
    cfg.n_values.clear();
    for (const auto& v : grids["n#"]) cfg.n_values.push_back(std::stoull(v));
    if (grids.count("rho")) {
        cfg.rho_values.clear();
        for (const auto& v : grids["rho"]) cfg.rho_values.push_back(to_double(v, source + ": rho"));
    }
    if (grids.count("tau2")) {
        cfg.tau2_values.clear();
        for (const auto& v : grids["tau2"]) cfg.tau2_values.push_back(to_double(v, source + ": tau2"));
    }
    if (grids.count("theta")) {
        cfg.theta_values.clear();
        for (const auto& v : grids["theta"]) cfg.theta_values.push_back(to_double(v, source + ": theta"));
    }
    if (grids.count("d_schedule")) {
        cfg.d_schedules.clear();
        for (const auto& v : grids["d_schedule"]) cfg.d_schedules.push_back(*parse_d_schedule(v));
    }
    try {
        cfg.validate();
    } catch (const ParameterError& e) {
        throw ParameterError(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    out.imbue(std::locale::classic());
    CLI::App app{"Multiple testing under equicorrelated normal noise", "eqc"};
    app.require_subcommand(1);

    // critical-value
    auto* cv = app.add_subcommand("critical-value", "critical value of the ad hoc or LR test");
    std::string method = "adhoc";
    double alpha = 0.05;
    std::size_t n = 0;
    double rho = 0.0;
    std::size_t reps = 100000;
    std::optional<std::uint64_t> seed_flag;
    cv->add_option("--method", method, "adhoc or lrt")->check(CLI::IsMember({"adhoc", "lrt"}));
    cv->add_option("--alpha", alpha, "family-wise level")->required();
    cv->add_option("--n", n, "number of channels")->required();
    cv->add_option("--rho", rho, "equicorrelation")->required();
    cv->add_option("--reps", reps, "null replicates for lrt");
    cv->add_option("--seed", seed_flag, "master seed for lrt");

    // posterior
    auto* post = app.add_subcommand("posterior", "posterior model probabilities");
    std::string x_inline;
    std::string x_file;
    double r = 0.5;
    double tau2 = 1.0;
    double p = 0.5;
    bool verify = false;
    bool asymptotic = false;
    post->add_option("--n", n, "number of channels")->required();
    post->add_option("--rho", rho, "equicorrelation")->required();
    post->add_option("--r", r, "prior null mass");
    post->add_option("--tau2", tau2, "slab variance");
    post->add_option("--p", p, "decision threshold");
    auto* x_opt = post->add_option("--x", x_inline, "observation, comma or space separated");
    auto* xf_opt = post->add_option("--x-file", x_file, "file holding the observation");
    x_opt->excludes(xf_opt);
    post->add_flag("--verify", verify, "cross-check against an independent closed form");
    post->add_flag("--asymptotic", asymptotic, "print the large-n approximation instead");

    // tau2
    auto* t2 = app.add_subcommand("tau2", "FPP-maximizing slab variance");
    t2->add_option("--n", n, "number of channels")->required();
    t2->add_option("--rho", rho, "equicorrelation");
    t2->add_option("--p", p, "decision threshold");
    t2->add_option("--r", r, "prior null mass");

    // kstar
    auto* ks = app.add_subcommand("kstar", "k* of the Type II MLE FPP");
    std::optional<std::size_t> ks_n;
    ks->add_option("--p", p, "decision threshold");
    ks->add_option("--r", r, "prior null mass");
    ks->add_option("--n", ks_n, "also print the Type II FPP at this n");

    // threshold
    auto* th = app.add_subcommand("threshold", "threshold p reaching a target FPP");
    double target = 0.05;
    th->add_option("--fpp", target, "target false positive probability")->required();
    th->add_option("--r", r, "prior null mass");
    th->add_option("--n", n, "number of channels")->required();
    th->add_flag("--verify", verify, "round-trip through the FPP formula");

    // fpp-asymptotic
    auto* fa = app.add_subcommand("fpp-asymptotic", "asymptotic false positive probability");
    std::string mode = "adaptive";
    fa->add_option("--mode", mode, "adaptive, type2 or fixed")
        ->check(CLI::IsMember({"adaptive", "type2", "fixed"}));
    fa->add_option("--n", n, "number of channels")->required();
    fa->add_option("--rho", rho, "equicorrelation");
    fa->add_option("--p", p, "decision threshold");
    fa->add_option("--r", r, "prior null mass");
    fa->add_option("--tau2", tau2, "slab variance (fixed mode)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment from a config file");
    std::string config_path;
    std::string output_path;
    std::optional<std::size_t> reps_flag;
    sim->add_option("--config", config_path, "experiment config file")->required();
    sim->add_option("--output", output_path, "CSV path (default stdout)");
    sim->add_option("--seed", seed_flag, "master seed (overrides the file)");
    sim->add_option("--reps", reps_flag, "replicates (overrides the file)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*cv) {
            const ModelSpec spec(n, rho);
            CriticalValue result;
            if (method == "adhoc") {
                result = adhoc_critical_value(alpha, spec);
            } else {
                const std::uint64_t seed = seed_flag ? *seed_flag : seed_from_env().value_or(1);
                result = lrt_critical_value(alpha, spec, reps, seed);
            }
            emit(out, "method", to_string(result.method));
            emit(out, "alpha_target", alpha);
            emit(out, "c", result.c);
            emit(out, "alpha_attained", result.alpha);
            if (result.method == TestMethod::lrt) {
                emit(out, "c_stderr", result.c_stderr);
                emit(out, "reps", std::to_string(result.reps));
                emit(out, "precision_warning", result.precision_warning ? "1" : "0");
                if (result.precision_warning) {
                    err << "warning: fewer than 100 null exceedances expected; increase --reps\n";
                }
            }
        } else if (*post) {
            std::vector<double> x;
            if (!x_file.empty()) {
                std::ifstream in(x_file);
                if (!in) throw ParameterError("cannot open x file '" + x_file + "'");
                std::stringstream buffer;
                buffer << in.rdbuf();
                x = parse_vector(buffer.str(), x_file);
            } else if (!x_inline.empty()) {
                x = parse_vector(x_inline, "--x");
            } else {
                throw ParameterError("posterior: one of --x or --x-file is required");
            }
            const ModelSpec spec(n, rho);
            const PriorSpec prior(r, tau2);
            check_observation(x, spec);
            const auto result = asymptotic ? posterior_asymptotic(x, spec, prior) : posterior(x, spec, prior);
            for (std::size_t i = 0; i < result.probs.size(); ++i) {
                emit(out, "P(M" + std::to_string(i) + ")", result.probs[i]);
            }
            const auto d = decide(result, p);
            emit(out, "decision", d.any() ? std::to_string(d.accepted) : std::string("none"));
            if (verify) {
                const auto check = n == 2 ? posterior_n2(x, rho, prior) : posterior_z_form(x, spec, prior);
                const auto exact = posterior(x, spec, prior);
                double diff = 0.0;
                for (std::size_t i = 0; i < check.probs.size(); ++i) {
                    diff = std::max(diff, std::abs(check.probs[i] - exact.probs[i]));
                }
                emit(out, "verify_max_abs_diff", diff);
                if (!(diff <= 1e-10)) {
                    err << "error: closed forms disagree by " << format_double(diff) << '\n';
                    return kExitNumerical;
                }
            }
        } else if (*t2) {
            const AdaptiveConfig cfg(p, r, rho, n);
            emit(out, "tau2_max_fpp", tau2_max_fpp(cfg));
            emit(out, "c_tau", cfg.c_tau());
            if (tau2_max_fpp_warning(n)) {
                emit(out, "warning", "log_log_n_not_positive");
                err << "warning: log log n <= 0, the formula is outside its asymptotic regime\n";
            }
        } else if (*ks) {
            const auto sol = solve_kstar(p, r);
            emit(out, "k_star", sol.k_star);
            emit(out, "residual", sol.residual);
            emit(out, "c_star", cstar_from_kstar(sol.k_star));
            emit(out, "inv_k_star_minus_half", 1.0 / sol.k_star - 0.5);
            if (ks_n) emit(out, "fpp_type2", fpp_type2_asymptotic(p, r, *ks_n));
        } else if (*th) {
            const auto sol = threshold_for_fpp(target, r, n);
            emit(out, "p", sol.p);
            emit(out, "residual", sol.residual);
            if (verify) {
                const double back = fpp_adaptive_asymptotic(AdaptiveConfig(sol.p, r, 0.0, n));
                emit(out, "roundtrip_fpp", back);
                if (!(std::abs(back - target) <= 1e-10)) {
                    err << "error: round trip missed the target by " << format_double(back - target) << '\n';
                    return kExitNumerical;
                }
            }
        } else if (*fa) {
            double value = 0.0;
            if (mode == "adaptive") {
                value = fpp_adaptive_asymptotic(AdaptiveConfig(p, r, rho, n));
            } else if (mode == "type2") {
                value = fpp_type2_asymptotic(p, r, n);
            } else {
                value = fpp_fixed_tau_rate(ModelSpec(n, rho), PriorSpec(r, tau2), p);
            }
            emit(out, "mode", mode);
            emit(out, "fpp", value);
        } else if (*sim) {
            auto cfg = load_config(config_path);
            if (seed_flag) {
                cfg.master_seed = *seed_flag;
            } else if (const auto env_seed = seed_from_env()) {
                cfg.master_seed = *env_seed;
            }
            if (reps_flag) cfg.reps = *reps_flag;
            const auto rows = run_experiment(cfg);
            if (output_path.empty()) {
                write_csv(out, rows);
            } else {
                std::ofstream file(output_path, std::ios::binary);
                if (!file) throw ParameterError("cannot write '" + output_path + "'");
                file.imbue(std::locale::classic());
                write_csv(file, rows);
            }
            err << "simulate: " << to_string(cfg.experiment) << ", " << rows.size() << " rows, seed "
                << cfg.master_seed << '\n';
        }
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace eqc::cli
