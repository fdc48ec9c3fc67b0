#pragma once

// Frequentist family-wise tests for the equicorrelated model:
//  * the ad hoc max-|X| test, with exact level alpha(c) by quadrature over the
//    common factor and critical values by bracketed root search;
//  * the likelihood ratio test statistic T, calibrated by simulation.

#include <cstddef>
#include <cstdint>
#include <span>

#include "eqc/model.hpp"

namespace eqc {

enum class TestMethod { adhoc, lrt };

const char* to_string(TestMethod method);

struct CriticalValue {
    double c = 0.0;
    double alpha = 0.0;  // attained level at c
    TestMethod method = TestMethod::adhoc;
    // Monte Carlo only (lrt): bootstrap standard error of c, replicate count,
    // and whether fewer than 100 null exceedances were expected.
    double c_stderr = 0.0;
    std::size_t reps = 0;
    bool precision_warning = false;
};

struct AlphaEvaluation {
    double alpha = 0.0;
    std::size_t hermite_nodes = 0;  // nodes of the last Gauss-Hermite pass
    bool used_split_quadrature = false;
};

// P(max_j |X_j| > c) under the null.
double adhoc_alpha(double c, const ModelSpec& spec);
AlphaEvaluation adhoc_alpha_detailed(double c, const ModelSpec& spec);

CriticalValue adhoc_critical_value(double alpha, const ModelSpec& spec);

struct RhoLimits {
    double phi_c_at_rho0 = 0.0;
    double phi_c_at_rho1 = 0.0;
};

// Phi(c) at the two correlation extremes: (1 + (1-alpha)^(1/n))/2 when
// rho = 0 and 1 - alpha/2 as rho -> 1.
RhoLimits adhoc_rho_limits(double alpha, std::size_t n);

// T = max_j [sqrt(1-rho) x_j + n rho (x_j - xbar)/sqrt(1-rho)]^2
double lrt_statistic(std::span<const double> x, const ModelSpec& spec);
// 0-based channel attaining the maximum in T (lowest index on ties).
std::size_t lrt_argmax(std::span<const double> x, const ModelSpec& spec);
// log LR = -T / (2 (1+(n-1)rho)(1+(n-2)rho)), the monotone image of T.
double lrt_log_likelihood_ratio(std::span<const double> x, const ModelSpec& spec);

// Empirical (1 - alpha) quantile of T over `reps` null replicates drawn from
// streams (seed, replicate). Requires reps >= 10^4.
CriticalValue lrt_critical_value(double alpha, const ModelSpec& spec, std::size_t reps,
                                 std::uint64_t seed, std::size_t workers = 0);

}  // namespace eqc
