#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

#include "finmb/histogram.hpp"

namespace finmb {

struct FitRange {
    double lo = 0;
    double hi = 0;
};

struct FitResult {
    std::map<std::string, double> params;     // slope/intercept or C/alpha
    std::map<std::string, double> std_errors; // same keys
    double adj_r_squared = 0;
    std::size_t n_points = 0;
    FitRange fit_range;
    std::size_t dropped = 0;    // points excluded (x or f not positive)
    std::string warning;        // nonempty for degenerate-but-allowed fits
};

// Ordinary least squares on (ln x, ln f) over the points with x inside
// [range.lo, range.hi]; the slope is the power exponent. Points with
// non-positive x or f are dropped and tallied. Requires at least 3 usable
// points and non-degenerate x. The fit range is always explicit input:
// automatic range selection is out of scope by design.
FitResult fit_loglog_slope(std::span<const std::pair<double, double>> points, FitRange range);

// Peak density value (the height at the modal bin); exact ties resolve to
// the bin center closest to zero. With b_min = 0 the small-X plateau makes
// this height the b_max estimate.
double extract_bmax(const Density& density);

// The modal bin itself: (center, density value), same tie rule.
std::pair<double, double> modal_bin(const Density& density);

// Fits b_max = C / tau^alpha by OLS on ln b_max = ln C - alpha ln tau from
// (tau seconds, b_max) samples. Reports C, alpha, their standard errors
// (se of C by the delta method from the intercept) and adjusted R^2. Two
// points interpolate exactly; adjusted R^2 is then reported as 1 with a
// warning.
FitResult fit_bmax_scaling(std::span<const std::pair<double, double>> tau_bmax);

} // namespace finmb
