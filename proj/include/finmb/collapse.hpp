#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "finmb/fit.hpp"
#include "finmb/histogram.hpp"
#include "finmb/model.hpp"

namespace finmb {

enum class CollapseMethod { unity, ratio };

struct CollapseResult {
    CollapseMethod method = CollapseMethod::unity;
    std::vector<std::pair<double, double>> points; // (Y, collapsed value)
    double flatness = 0;
    FitRange region;               // where flatness was computed
    double rescale_factor = 1.0;   // unity method: applied to the density
    std::uint64_t excluded = 0;    // ratio method: bins with Z below floor
};

// Robust relative spread: (p90 - p10) / |median| over the points with Y in
// region, with nearest-rank percentiles. 0 for exactly constant data;
// a zero median is fatal.
double flatness(std::span<const std::pair<double, double>> points, FitRange region);

// Central 80% of the populated bins, counted in bins and excluding the
// zero bin: the default flatness region (tail bins are sampling-noise
// dominated).
FitRange default_flatness_region(const Density& density);

// Unity collapse: Psi' = Psi_rescaled * beta^n |Y|^n + exp(-beta^n |Y|^n
// C/tau^alpha) per bin, the zero bin excluded. The density is first
// rescaled so its peak matches the model shape's Y->0 limit C/tau^alpha
// (the factor is reported); an exact model density then collapses to 1
// identically. Requires the scaling parameterization (y = 0, b_min = 0).
CollapseResult collapse_unity(const Density& density, const ModelParams& params,
                              std::optional<FitRange> region = std::nullopt);

// Ratio collapse: Psi(Y)/Z(Y) on populated bins; bins where the evaluator
// falls below 1e-300 are excluded and tallied.
CollapseResult collapse_ratio(const Density& density,
                              const std::function<double(double)>& z_evaluator,
                              std::optional<FitRange> region = std::nullopt);

} // namespace finmb
