#include "eqc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "eqc/errors.hpp"

namespace eqc::numeric {

namespace {

// Mills ratio (1 - Phi(x)) / phi(x) by backward evaluation of Laplace's
// continued fraction; accurate to full precision for x >= 20.
double mills_ratio_far_tail(double x) {
    double tail = x;
    for (int k = 120; k >= 1; --k) tail = x + k / tail;
    return 1.0 / tail;
}

constexpr double kFarTail = 30.0;

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double normal_log_sf(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return std::log1p(-normal_cdf(x));
    if (x < kFarTail) return std::log(normal_sf(x));
    return normal_log_pdf(x) + std::log(mills_ratio_far_tail(x));
}

double normal_log_cdf(double x) { return normal_log_sf(-x); }

double normal_quantile(double p) {
    if (std::isnan(p)) return p;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    if (p > 0.5) return kSqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

namespace {

// Eigenvalues of a symmetric tridiagonal matrix (zero diagonal here) by the
// implicit QL method; `off` holds the n-1 off-diagonal entries.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off) {
    const std::size_t n = diag.size();
    off.push_back(0.0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        for (;;) {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (++iter > 60) throw NumericalError("tridiagonal eigenvalues: QL iteration did not converge");
            double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            double r = std::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            std::size_t i = m;
            bool deflated = false;
            while (i-- > l) {
                double f = s * off[i];
                const double b = c * off[i];
                r = std::hypot(f, g);
                off[i + 1] = r;
                if (r == 0.0) {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if (deflated) continue;
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    std::sort(diag.begin(), diag.end());
    return diag;
}

// Nodes from the eigenvalues of the Jacobi matrix, then a Newton polish on
// the orthonormal recurrence (with a running log-scale so n in the thousands
// does not overflow), which also yields the weights.
GaussHermiteRule build_gauss_hermite(std::size_t n) {
    std::vector<double> off(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) off[k] = std::sqrt(0.5 * static_cast<double>(k + 1));
    const auto guesses = tridiagonal_eigenvalues(std::vector<double>(n, 0.0), off);

    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double pi_m4 = std::pow(kPi, -0.25);
    const double nd = static_cast<double>(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Largest nodes first; guesses are sorted ascending.
        double z = std::abs(guesses[n - 1 - i]);
        if (n % 2 == 1 && i + 1 == half) z = 0.0;
        double log_pp = 0.0;
        double step = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 8; ++iter) {
            double p1 = pi_m4;
            double p2 = 0.0;
            double log_scale = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
                if (std::abs(p1) > 1e150) {
                    p1 *= 1e-150;
                    p2 *= 1e-150;
                    log_scale += 150.0 * std::log(10.0);
                }
            }
            const double pp = std::sqrt(2.0 * nd) * p2;
            log_pp = std::log(std::abs(pp)) + log_scale;
            const double next = z - p1 / pp;
            const double new_step = std::abs(next - z);
            if (new_step >= step) break;  // at rounding level
            step = new_step;
            z = next;
            if (step <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (!(step <= 1e-9 * std::max(1.0, std::abs(z)))) {
            std::ostringstream msg;
            msg << "Gauss-Hermite node " << i << " of " << n << " did not converge (last step " << step << ")";
            throw NumericalError(msg.str());
        }
        const double w = 2.0 * std::exp(-2.0 * log_pp);
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(std::size_t node_count) {
    if (node_count == 0) throw ParameterError("gauss_hermite: node_count must be positive");
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[node_count];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(build_gauss_hermite(node_count));
    return *slot;
}

double expect_standard_normal(const GaussHermiteRule& rule,
                              const std::function<double(double)>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        if (rule.weights[i] == 0.0) continue;
        sum += rule.weights[i] * f(kSqrt2 * rule.nodes[i]);
    }
    return sum / std::sqrt(kPi);
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     std::size_t max_iterations) {
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if (!(std::signbit(f_lo) != std::signbit(f_hi)) || std::isnan(f_lo) || std::isnan(f_hi)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "root not bracketed on [" << lo << ", " << hi << "]: f(lo)=" << f_lo
            << ", f(hi)=" << f_hi;
        throw NumericalError(msg.str());
    }
    boost::uintmax_t iterations = max_iterations;
    boost::math::tools::eps_tolerance<double> tolerance(std::numeric_limits<double>::digits - 2);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tolerance, iterations);
    const double fa = f(a);
    const double fb = f(b);
    const double x = std::abs(fa) <= std::abs(fb) ? a : b;
    return {x, std::min(std::abs(fa), std::abs(fb)) == std::abs(fa) ? fa : fb,
            static_cast<std::size_t>(iterations)};
}

MinimumResult minimize_bracketed(const std::function<double(double)>& f, double lo, double hi,
                                 int bits) {
    boost::uintmax_t max_iter = 500;
    auto [x, value] = boost::math::tools::brent_find_minima(f, lo, hi, bits, max_iter);
    return {x, value};
}

}  // namespace eqc::numeric
