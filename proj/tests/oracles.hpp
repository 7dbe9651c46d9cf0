#pragma once

// Test-side oracles, independent of the library implementations they
// check: plain summation, adaptive quadrature, analytic inverse CDFs and
// a KS statistic. Nothing in here may call into finmb numerics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// Plain term-by-term sum of exp(-X * B_j), no stabilization.
inline double naive_partition_sum(const std::vector<double>& bs, double X) {
    double s = 0;
    for (double b : bs) s += std::exp(-X * b);
    return s;
}

// Compensated (Kahan) sum.
inline double kahan_sum(const std::vector<double>& xs) {
    double s = 0, c = 0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// Adaptive Simpson quadrature with absolute/relative tolerance.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 60) {
    const double m = (a + b) / 2;
    const double fa = f(a), fm = f(m), fb = f(b);
    return detail::adapt(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb), tol, depth);
}

// Kolmogorov-Smirnov statistic of samples against U[lo, hi].
inline double ks_uniform(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = (xs[i] - lo) / (hi - lo);
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

// Analytic inverse-CDF draw from pdf proportional to x^(-p) on [1, inf),
// p > 1: F^{-1}(u) = (1 - u)^(-1/(p-1)).
inline std::vector<double> power_law_samples(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> xs(n);
    for (double& x : xs) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x = std::pow(1.0 - u, -1.0 / (p - 1.0));
    }
    return xs;
}

// Ordinary least squares slope of y on x (the only use is cross-checking
// slopes of analytically generated data).
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

} // namespace oracles
