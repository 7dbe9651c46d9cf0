#include "finmb/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finmb/errors.hpp"
#include "finmb/rng.hpp"

namespace finmb {

BSet sample_bset_uniform(std::size_t J, double b_min, double b_max, std::uint64_t seed) {
    if (J == 0) throw data_error("sample_bset_uniform: J must be >= 1");
    if (!(b_max > b_min)) throw data_error("sample_bset_uniform: requires b_max > b_min");
    Rng rng(seed);
    BSet s;
    s.kind = BSetKind::uniform_sorted;
    s.b_min = b_min;
    s.b_max = b_max;
    s.seed = seed;
    s.values.resize(J);
    for (double& v : s.values) v = uniform01(rng);
    std::sort(s.values.begin(), s.values.end());
    const double span = b_max - b_min;
    for (double& v : s.values) v = span * v + b_min;
    return s;
}

BSet make_bset_linear(std::size_t J, double step) {
    if (J == 0) throw data_error("make_bset_linear: J must be >= 1");
    if (!(step > 0)) throw data_error("make_bset_linear: step must be positive");
    BSet s;
    s.kind = BSetKind::linear;
    s.step = step;
    s.values.resize(J);
    for (std::size_t j = 0; j < J; ++j) s.values[j] = static_cast<double>(j + 1) * step;
    s.b_min = s.values.front();
    s.b_max = s.values.back();
    return s;
}

double ModelParams::b_max_scaling() const { return C / std::pow(tau, alpha); }

void validate_shape_params(const ModelParams& p) {
    if (!(p.n > 0)) throw data_error("model params: n must be positive");
    if (!(p.beta > 0)) throw data_error("model params: beta must be positive");
    if (!(p.b_max > p.b_min)) throw data_error("model params: requires b_max > b_min");
}

void validate_scaling_params(const ModelParams& p) {
    if (!(p.n > 0)) throw data_error("model params: n must be positive");
    if (!(p.beta > 0)) throw data_error("model params: beta must be positive");
    if (p.y != 0) throw data_error("scaling form requires y = 0");
    if (p.b_min != 0) throw data_error("scaling form requires b_min = 0");
    if (!(p.C > 0) || !(p.alpha > 0) || !(p.tau > 0))
        throw data_error("scaling form requires C, alpha, tau > 0");
}

double partition_sum(const BSet& bset, double X) {
    // Largest exponent: -X * B_front for X >= 0, -X * B_back otherwise
    // (values are non-decreasing).
    const double m = std::max(-X * bset.values.front(), -X * bset.values.back());
    double sum = 0;
    for (const double b : bset.values) sum += std::exp(-X * b - m);
    const double z = std::exp(m) * sum;
    if (!std::isfinite(z))
        throw computation_error("partition_sum overflow: X=" + std::to_string(X) +
                                " J=" + std::to_string(bset.count()) +
                                " max_exponent=" + std::to_string(m));
    return z;
}

std::vector<double> mb_weights(const BSet& bset, double X) {
    const double m = std::max(-X * bset.values.front(), -X * bset.values.back());
    std::vector<double> w(bset.count());
    double sum = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = std::exp(-X * bset.values[j] - m);
        sum += w[j];
    }
    for (double& v : w) v /= sum;
    return w;
}

double z_uniform_closed(double b_min, double b_max, double X) {
    if (!(b_max > b_min)) throw data_error("z_uniform_closed: requires b_max > b_min");
    const double span = b_max - b_min;
    const double u = X * span;
    if (std::fabs(u) < 1e-4) {
        // 4-term series of (1 - e^(-u))/u; truncation ~ u^4/120 < 1e-19.
        return std::exp(-X * b_min) * span * (1.0 - u / 2 + u * u / 6 - u * u * u / 24);
    }
    return (std::exp(-X * b_min) - std::exp(-X * b_max)) / X;
}

double z_geometric_closed(double B, double X, std::uint64_t J) {
    if (!(B > 0)) throw data_error("z_geometric_closed: B must be positive");
    const double x = X * B;
    if (J == kInfiniteJ) {
        if (!(x > 0)) throw computation_error("z_geometric_closed: series diverges for X*B <= 0");
        return 1.0 / std::expm1(x);
    }
    if (x == 0) return static_cast<double>(J);
    // Truncation error of the infinite form is r^J; below 1e-15 the finite
    // correction is invisible in double precision.
    if (x > 0 && J >= 1000 && static_cast<double>(J) * x > 35.0) return 1.0 / std::expm1(x);
    // r (1 - r^J) / (1 - r) via expm1: 1 - r^J = -expm1(-J x), 1 - r = -expm1(-x).
    const double z = std::exp(-x) * std::expm1(-static_cast<double>(J) * x) / std::expm1(-x);
    if (!std::isfinite(z))
        throw computation_error("z_geometric_closed overflow: X*B=" + std::to_string(x) +
                                " J=" + std::to_string(J));
    return z;
}

namespace {

// ln(1 - e^(-t)) for t > 0 without cancellation at either end.
double log1mexp(double t) {
    return t > 0.6931471805599453 ? std::log1p(-std::exp(-t)) : std::log(-std::expm1(-t));
}

} // namespace

double z_integral_bose(double b_min, double b_max, double X) {
    if (!(b_min > 0) || !(X > 0))
        throw computation_error("z_integral_bose: outside integral domain (needs b_min > 0, X > 0)");
    if (!(b_max > b_min)) throw data_error("z_integral_bose: requires b_max > b_min");
    return (log1mexp(X * b_max) - log1mexp(X * b_min)) / X;
}

double model_density(double Y, const ModelParams& p) {
    validate_shape_params(p);
    // |Y - y|^n keeps X real and non-negative for odd or fractional n.
    const double X = std::pow(p.beta * std::fabs(Y - p.y), p.n);
    return z_uniform_closed(p.b_min, p.b_max, X);
}

double model_density_tau(double Y, const ModelParams& p) {
    validate_scaling_params(p);
    const double bmax = p.b_max_scaling();
    if (Y == 0) return std::pow(p.beta, p.n) * bmax;
    const double yn = std::pow(std::fabs(Y), p.n);
    const double u = std::pow(p.beta * std::fabs(Y), p.n) * bmax;
    return -std::expm1(-u) / yn;
}

double bose_density(double Y, double B, double beta, double y) {
    if (!(B > 0)) throw data_error("bose_density: B must be positive");
    if (!(beta > 0)) throw data_error("bose_density: beta must be positive");
    if (!(Y > y)) throw computation_error("bose_density: outside domain (requires Y > y)");
    return 1.0 / std::expm1(B * beta * (Y - y));
}

namespace {

// Trapezoid weight of grid node i.
double node_weight(std::span<const std::pair<double, double>> pts, std::size_t i) {
    const std::size_t n = pts.size();
    if (n == 1) return 1.0;
    if (i == 0) return (pts[1].first - pts[0].first) / 2;
    if (i == n - 1) return (pts[n - 1].first - pts[n - 2].first) / 2;
    return (pts[i + 1].first - pts[i - 1].first) / 2;
}

} // namespace

Moments density_moments(std::span<const std::pair<double, double>> points) {
    if (points.empty()) throw data_error("density_moments: empty grid");
    const std::size_t n = points.size();
    double mass = 0;
    for (std::size_t i = 0; i < n; ++i) mass += node_weight(points, i) * points[i].second;
    if (!(mass > 0)) throw computation_error("density_moments: zero total mass");

    // First moment summed pairwise from both ends: mirrored terms cancel
    // exactly, so symmetric inputs give mean 0 with no rounding residue.
    double first = 0;
    for (std::size_t i = 0, j = n - 1; i < j; ++i, --j) {
        first += (node_weight(points, i) * points[i].first * points[i].second +
                  node_weight(points, j) * points[j].first * points[j].second);
    }
    if (n % 2 == 1) {
        const std::size_t mid = n / 2;
        first += node_weight(points, mid) * points[mid].first * points[mid].second;
    }
    const double mean = first / mass;

    double second = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = points[i].first - mean;
        second += node_weight(points, i) * d * d * points[i].second;
    }
    return {mean, std::sqrt(second / mass)};
}

Moments density_moments(const Density& d) {
    return density_moments(std::span<const std::pair<double, double>>(d.points));
}

std::vector<double> sample_from_density(const std::function<double(double)>& density,
                                        double lo, double hi, std::size_t count,
                                        std::uint64_t seed, std::size_t grid_cells) {
    if (!(hi > lo)) throw data_error("sample_from_density: requires hi > lo");
    grid_cells = std::max<std::size_t>(grid_cells, 1u << 16);

    // Midpoint rule: one density evaluation per cell, mass f(mid) * step.
    // A density positive in a single cell then puts every sample in that
    // cell, and a constant density gives an exactly linear CDF.
    const std::size_t nodes = grid_cells + 1;
    std::vector<double> x(nodes), cdf(nodes);
    const double step = (hi - lo) / static_cast<double>(grid_cells);
    cdf[0] = 0.0;
    x[0] = lo;
    for (std::size_t i = 1; i < nodes; ++i) {
        x[i] = lo + step * static_cast<double>(i);
        const double mid = x[i - 1] + step / 2;
        const double f = density(mid);
        if (!std::isfinite(f) || f < 0)
            throw computation_error("sample_from_density: density not finite and non-negative at Y=" +
                                    std::to_string(mid));
        cdf[i] = cdf[i - 1] + f * step;
    }
    const double mass = cdf.back();
    if (!(mass > 0)) throw computation_error("sample_from_density: zero total mass on grid");
    for (double& c : cdf) c /= mass;
    cdf.back() = 1.0;

    Rng rng(seed);
    std::vector<double> out(count);
    for (double& v : out) {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - cdf.begin()) - 1;
        const double seg = cdf[k + 1] - cdf[k];
        v = seg > 0 ? x[k] + (u - cdf[k]) / seg * step : x[k];
    }
    return out;
}

} // namespace finmb
