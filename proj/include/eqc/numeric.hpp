#pragma once

// Numerical building blocks shared by every module: standard normal
// functions with tail-accurate logarithms, log-sum-exp, Gauss-Hermite rules
// and thin wrappers around bracketed 1-D root finding / minimization.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace eqc::numeric {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);
// log(1 - Phi(x)); finite for every finite x (asymptotic continued fraction
// in the far tail where erfc underflows).
double normal_log_sf(double x);
double normal_log_cdf(double x);
double normal_quantile(double p);

// log(sum_i exp(v_i)); returns -inf for an empty span or all -inf entries.
double log_sum_exp(std::span<const double> values);

/// Gauss-Hermite rule for the weight exp(-x^2): sum_i w_i f(x_i) approximates
/// the integral of f(x) exp(-x^2) over the real line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached per node count; safe to call concurrently.
const GaussHermiteRule& gauss_hermite(std::size_t node_count);

// E[f(Z)] for Z ~ N(0,1) with the given rule.
double expect_standard_normal(const GaussHermiteRule& rule,
                              const std::function<double(double)>& f);

struct RootResult {
    double x = 0.0;
    double f_at_x = 0.0;
    std::size_t iterations = 0;
};

// Bracketed root of a continuous function on [lo, hi]. Throws NumericalError
// with the endpoint values when f(lo) and f(hi) share a sign.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     std::size_t max_iterations = 200);

struct MinimumResult {
    double x = 0.0;
    double value = 0.0;
};

// Minimum of a unimodal function on [lo, hi] (golden section with parabolic
// steps).
MinimumResult minimize_bracketed(const std::function<double(double)>& f, double lo,
                                 double hi, int bits = 40);

}  // namespace eqc::numeric
