#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "finmb/histogram.hpp"

namespace finmb {

// A finite set of exponent multipliers {B_j}, non-decreasing. Either
// sorted uniforms affinely mapped onto [b_min, b_max), or the arithmetic
// progression B_j = j * step.
enum class BSetKind { uniform_sorted, linear };

struct BSet {
    BSetKind kind = BSetKind::linear;
    std::vector<double> values; // non-decreasing
    double b_min = 0;
    double b_max = 0;
    double step = 0;            // linear only
    std::uint64_t seed = 0;     // uniform_sorted only

    std::size_t count() const { return values.size(); }
};

// J sorted uniforms on [b_min, b_max) from a seeded mt19937_64; the same
// seed reproduces the set bit for bit.
BSet sample_bset_uniform(std::size_t J, double b_min, double b_max, std::uint64_t seed);

// B_j = j * step for j = 1..J.
BSet make_bset_linear(std::size_t J, double step);

// Parameters of the model densities. X in the Boltzmann factor is
// beta^n |Y - y|^n; b_min/b_max bound the multipliers; C, alpha, tau
// parameterize b_max = C / tau^alpha when the scaling form is in use.
struct ModelParams {
    double n = 4;
    double y = 0;
    double beta = 1;
    double b_min = 0;
    double b_max = 1;
    double C = 0;
    double alpha = 0;
    double tau = 0; // seconds

    double b_max_scaling() const; // C / tau^alpha
};

void validate_shape_params(const ModelParams& p);   // n, beta, b_min/b_max form
void validate_scaling_params(const ModelParams& p); // y = 0, b_min = 0, C/alpha/tau > 0

// Sum over j of exp(-X * B_j), evaluated with the largest exponent
// factored out so intermediate terms never overflow. A result beyond
// double range is fatal.
double partition_sum(const BSet& bset, double X);

// exp(-X * B_j) / Z for each j; the weights sum to 1.
std::vector<double> mb_weights(const BSet& bset, double X);

// Continuum partition function over uniform multipliers on [b_min, b_max]:
// (exp(-X b_min) - exp(-X b_max)) / X, with a series expansion below
// |X (b_max - b_min)| = 1e-4 so the X -> 0 plateau (b_max - b_min) is hit
// without cancellation; continuous at the crossover to < 1e-12 relative.
double z_uniform_closed(double b_min, double b_max, double X);

// Geometric-series partition function over B_j = j B. Finite J gives
// r (1 - r^J) / (1 - r) with r = exp(-X B); J = 0 means the infinite
// series 1/(exp(X B) - 1), which requires X B > 0. The infinite form is
// also used for finite J when its truncation error r^J is below 1e-15.
double z_geometric_closed(double B, double X, std::uint64_t J);
constexpr std::uint64_t kInfiniteJ = 0;

// Integral of the geometric form over [b_min, b_max]:
// (1/X) [ln(1 - e^(-X b_max)) - ln(1 - e^(-X b_min))], with
// log-of-complement evaluation stable at both ends. Requires
// b_max > b_min > 0 and X > 0.
double z_integral_bose(double b_min, double b_max, double X);

// The general model density: z_uniform_closed at X = beta^n |Y - y|^n.
// Value at Y = y is the plateau b_max - b_min.
double model_density(double Y, const ModelParams& p);

// Scaling form with y = 0, b_min = 0, b_max = C / tau^alpha:
// (1 - exp(-beta^n |Y|^n C / tau^alpha)) / |Y|^n, with the removable
// singularity at Y = 0 equal to beta^n C / tau^alpha.
double model_density_tau(double Y, const ModelParams& p);

// 1 / (exp(B beta (Y - y)) - 1) for Y > y, stable for small arguments.
double bose_density(double Y, double B, double beta, double y);

struct Moments {
    double mean = 0;     // y
    double inv_beta = 0; // standard deviation
};

// Self-normalizing mean and standard deviation of a (possibly
// unnormalized) non-negative shape sampled on an ordered grid; trapezoid
// weights, so mildly non-uniform grids are fine.
Moments density_moments(std::span<const std::pair<double, double>> points);
Moments density_moments(const Density& d);

// Inverse-CDF sampling from a density evaluator tabulated on a dense grid
// (grid_cells >= 2^16 by default); deterministic given the seed.
std::vector<double> sample_from_density(const std::function<double(double)>& density,
                                        double lo, double hi, std::size_t count,
                                        std::uint64_t seed, std::size_t grid_cells = 1u << 16);

} // namespace finmb
