#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace finmb {

// Fixed-width histogram with sparse signed bin indices: value v lands in
// bin floor((v - origin) / bin_width). Histograms with equal geometry are
// mergeable accumulators (integer addition, so merge order never matters).
class Histogram {
public:
    Histogram(double bin_width, double origin);

    void add_values(std::span<const double> values);
    void add_bin(std::int64_t index, std::uint64_t count);
    void merge(const Histogram& other);

    double bin_width() const { return bin_width_; }
    double origin() const { return origin_; }
    std::uint64_t total() const { return total_; }
    bool empty() const { return counts_.empty(); }

    double left_edge(std::int64_t index) const { return origin_ + bin_width_ * index; }
    double center(std::int64_t index) const { return origin_ + bin_width_ * (index + 0.5); }

    const std::unordered_map<std::int64_t, std::uint64_t>& counts() const { return counts_; }

    // Stored (index, count) pairs sorted by index; count > 0 for each.
    std::vector<std::pair<std::int64_t, std::uint64_t>> sorted_bins() const;

private:
    double bin_width_;
    double origin_;
    std::unordered_map<std::int64_t, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

Histogram histogram(std::span<const double> values, double bin_width, double origin);

// Histogram of |v| with origin 0.
Histogram magnitude_histogram(std::span<const double> values, double bin_width);

Histogram merge(const Histogram& a, const Histogram& b);

// Normalized density: one point per bin from the lowest to the highest
// populated bin, interior empty bins emitted with density 0, so that
// sum(density * bin_width) = 1.
struct Density {
    double bin_width = 0;
    std::vector<std::pair<double, double>> points; // (bin center, density)
};

Density to_density(const Histogram& h);

// Bin frequencies in decreasing order; ties broken by ascending bin index
// so output is reproducible byte for byte.
struct RankDistribution {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> entries; // (rank, frequency)
};

RankDistribution rank_order(const Histogram& h);

enum class CumulativeDirection { above, below };

// Per bin edge from the lowest to the highest populated bin: `above` gives
// the count of values >= edge, `below` the complement (count < edge).
std::vector<std::pair<double, std::uint64_t>> cumulative(const Histogram& h,
                                                         CumulativeDirection direction);

} // namespace finmb
