#include "finmb/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "finmb/errors.hpp"

namespace finmb {

namespace {

double nearest_rank(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(n)));
    return sorted[k == 0 ? 0 : k - 1];
}

} // namespace

double flatness(std::span<const std::pair<double, double>> points, FitRange region) {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& [y, value] : points)
        if (y >= region.lo && y <= region.hi && std::isfinite(value)) v.push_back(value);
    if (v.size() < 2)
        throw computation_error("flatness: needs >= 2 finite points in region");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    if (median == 0) throw computation_error("flatness: median is zero");
    return (nearest_rank(v, 0.9) - nearest_rank(v, 0.1)) / std::fabs(median);
}

FitRange default_flatness_region(const Density& density) {
    std::vector<double> centers;
    centers.reserve(density.points.size());
    const double half = density.bin_width / 2;
    for (const auto& [y, value] : density.points)
        if (value > 0 && std::fabs(y) >= half) centers.push_back(y);
    if (centers.size() < 2)
        throw computation_error("flatness region: needs >= 2 populated nonzero bins");
    const std::size_t n = centers.size();
    const std::size_t lo = n / 10;
    const std::size_t hi = n - 1 - n / 10;
    return {centers[lo], centers[hi]};
}

CollapseResult collapse_unity(const Density& density, const ModelParams& params,
                              std::optional<FitRange> region) {
    validate_scaling_params(params);
    if (density.points.empty()) throw computation_error("collapse_unity: empty density");

    const double bmax = params.b_max_scaling();
    // Match the density's peak to the model shape's Y->0 limit. The
    // beta-absorbed shape (1 - e^(-beta^n Y^n bmax)) / (beta^n Y^n) tends
    // to bmax at Y -> 0, so a density equal to the model collapses to
    // exactly 1 whatever its normalization.
    // An all-zero density has nothing to match; Psi' then reduces to the
    // bare exponential term.
    const double peak = extract_bmax(density);
    const double factor = peak > 0 ? bmax / peak : 1.0;

    CollapseResult res;
    res.method = CollapseMethod::unity;
    res.rescale_factor = factor;
    const double half = density.bin_width / 2;
    res.points.reserve(density.points.size());
    for (const auto& [y, psi] : density.points) {
        if (std::fabs(y) < half) continue; // zero bin: Y^n term vanishes there
        const double xn = std::pow(params.beta * std::fabs(y), params.n);
        res.points.emplace_back(y, factor * psi * xn + std::exp(-xn * bmax));
    }
    res.region = region ? *region : default_flatness_region(density);
    res.flatness = flatness(res.points, res.region);
    return res;
}

CollapseResult collapse_ratio(const Density& density,
                              const std::function<double(double)>& z_evaluator,
                              std::optional<FitRange> region) {
    if (density.points.empty()) throw computation_error("collapse_ratio: empty density");
    CollapseResult res;
    res.method = CollapseMethod::ratio;
    res.points.reserve(density.points.size());
    for (const auto& [y, psi] : density.points) {
        if (!(psi > 0)) continue;
        const double z = z_evaluator(y);
        if (!(z >= 1e-300)) {
            ++res.excluded;
            continue;
        }
        res.points.emplace_back(y, psi / z);
    }
    if (res.points.size() < 2)
        throw computation_error("collapse_ratio: fewer than 2 usable bins");
    res.region = region ? *region : default_flatness_region(density);
    res.flatness = flatness(res.points, res.region);
    return res;
}

} // namespace finmb
