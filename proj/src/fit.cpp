#include "finmb/fit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "finmb/errors.hpp"

namespace finmb {

namespace {

struct Ols {
    double slope, intercept, se_slope, se_intercept, adj_r_squared;
    std::size_t n;
};

Ols ols_loglog(const std::vector<std::pair<double, double>>& lx_lf, const char* op) {
    const std::size_t n = lx_lf.size();
    double sx = 0, sy = 0;
    for (const auto& [x, y] : lx_lf) {
        sx += x;
        sy += y;
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : lx_lf) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0) throw computation_error(std::string(op) + ": degenerate fit (all x equal)");

    Ols o;
    o.n = n;
    o.slope = sxy / sxx;
    o.intercept = my - o.slope * mx;
    double sse = 0;
    for (const auto& [x, y] : lx_lf) {
        const double r = y - (o.intercept + o.slope * x);
        sse += r * r;
    }
    if (n > 2) {
        const double s2 = sse / static_cast<double>(n - 2);
        o.se_slope = std::sqrt(s2 / sxx);
        o.se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
        // R^2 of a constant response is taken as 1 (the line fits exactly).
        const double r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
        o.adj_r_squared =
            1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - 2);
    } else {
        o.se_slope = 0;
        o.se_intercept = 0;
        o.adj_r_squared = 1.0;
    }
    return o;
}

} // namespace

FitResult fit_loglog_slope(std::span<const std::pair<double, double>> points, FitRange range) {
    if (!(range.hi > range.lo)) throw data_error("fit_loglog_slope: invalid range");
    FitResult res;
    res.fit_range = range;
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const auto& [x, f] : points) {
        if (x < range.lo || x > range.hi) continue;
        if (!(x > 0) || !(f > 0)) {
            ++res.dropped;
            continue;
        }
        logs.emplace_back(std::log(x), std::log(f));
    }
    if (logs.size() < 3)
        throw computation_error("fit_loglog_slope: needs >= 3 usable points in range, got " +
                                std::to_string(logs.size()));
    const Ols o = ols_loglog(logs, "fit_loglog_slope");
    res.params = {{"slope", o.slope}, {"intercept", o.intercept}};
    res.std_errors = {{"slope", o.se_slope}, {"intercept", o.se_intercept}};
    res.adj_r_squared = o.adj_r_squared;
    res.n_points = o.n;
    return res;
}

std::pair<double, double> modal_bin(const Density& density) {
    if (density.points.empty()) throw computation_error("extract_bmax: empty density");
    double best_value = -std::numeric_limits<double>::infinity();
    double best_center = 0;
    for (const auto& [center, value] : density.points) {
        const bool better =
            value > best_value ||
            (value == best_value && (std::fabs(center) < std::fabs(best_center) ||
                                     (std::fabs(center) == std::fabs(best_center) &&
                                      center < best_center)));
        if (better) {
            best_value = value;
            best_center = center;
        }
    }
    return {best_center, best_value};
}

double extract_bmax(const Density& density) { return modal_bin(density).second; }

FitResult fit_bmax_scaling(std::span<const std::pair<double, double>> tau_bmax) {
    if (tau_bmax.size() < 2)
        throw computation_error("fit_bmax_scaling: needs >= 2 (tau, b_max) samples");
    std::vector<std::pair<double, double>> logs;
    logs.reserve(tau_bmax.size());
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& [tau, bmax] : tau_bmax) {
        if (!(tau > 0) || !(bmax > 0))
            throw computation_error("fit_bmax_scaling: tau and b_max must be positive");
        logs.emplace_back(std::log(tau), std::log(bmax));
        lo = std::min(lo, tau);
        hi = std::max(hi, tau);
    }
    const Ols o = ols_loglog(logs, "fit_bmax_scaling");
    const double alpha = -o.slope;
    const double C = std::exp(o.intercept);
    FitResult res;
    res.params = {{"C", C}, {"alpha", alpha}};
    // se of C from se of ln C by the delta method.
    res.std_errors = {{"C", C * o.se_intercept}, {"alpha", o.se_slope}};
    res.adj_r_squared = o.adj_r_squared;
    res.n_points = o.n;
    res.fit_range = {lo, hi};
    if (o.n == 2) res.warning = "two-point fit: adjusted R^2 undefined, reported as 1";
    return res;
}

} // namespace finmb
