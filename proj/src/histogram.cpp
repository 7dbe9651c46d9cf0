#include "finmb/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "finmb/errors.hpp"
#include "finmb/kernels.hpp"

namespace finmb {

Histogram::Histogram(double bin_width, double origin) : bin_width_(bin_width), origin_(origin) {
    if (!(bin_width > 0) || !std::isfinite(bin_width))
        throw data_error("histogram: bin_width must be positive and finite");
    if (!std::isfinite(origin)) throw data_error("histogram: origin must be finite");
}

void Histogram::add_values(std::span<const double> values) {
    constexpr std::size_t kBlock = 4096;
    std::int64_t idx[kBlock];
    std::size_t done = 0;
    // Mode-heavy data hits the same bin in runs; cache the last slot to
    // skip most hash lookups.
    std::int64_t last_index = 0;
    std::uint64_t* last_slot = nullptr;
    while (done < values.size()) {
        const std::size_t n = std::min(kBlock, values.size() - done);
        const std::ptrdiff_t bad =
            kernels::bin_index(values.data() + done, origin_, bin_width_, idx, n);
        if (bad >= 0) {
            const std::size_t at = done + static_cast<std::size_t>(bad);
            const double v = values[at];
            if (!std::isfinite(v))
                throw computation_error("histogram: non-finite value at index " +
                                        std::to_string(at));
            throw computation_error("histogram: value at index " + std::to_string(at) +
                                    " overflows the bin index range");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (last_slot && idx[i] == last_index) {
                ++*last_slot;
            } else {
                last_index = idx[i];
                last_slot = &counts_[last_index];
                ++*last_slot;
            }
        }
        done += n;
        total_ += n;
    }
}

void Histogram::add_bin(std::int64_t index, std::uint64_t count) {
    if (count == 0) return;
    counts_[index] += count;
    total_ += count;
}

void Histogram::merge(const Histogram& other) {
    if (bin_width_ != other.bin_width_ || origin_ != other.origin_)
        throw data_error("histogram merge: mismatched geometry");
    for (const auto& [index, count] : other.counts_) {
        counts_[index] += count;
    }
    total_ += other.total_;
}

std::vector<std::pair<std::int64_t, std::uint64_t>> Histogram::sorted_bins() const {
    std::vector<std::pair<std::int64_t, std::uint64_t>> bins(counts_.begin(), counts_.end());
    std::sort(bins.begin(), bins.end());
    return bins;
}

Histogram histogram(std::span<const double> values, double bin_width, double origin) {
    Histogram h(bin_width, origin);
    h.add_values(values);
    return h;
}

Histogram magnitude_histogram(std::span<const double> values, double bin_width) {
    std::vector<double> mags(values.size());
    kernels::abs_values(values.data(), mags.data(), values.size());
    return histogram(mags, bin_width, 0.0);
}

Histogram merge(const Histogram& a, const Histogram& b) {
    Histogram out = a;
    out.merge(b);
    return out;
}

namespace {

// to_density and cumulative materialize every bin between the populated
// extremes; refuse spans that would exhaust memory (a handful of outliers
// with a tiny bin width).
constexpr std::int64_t kMaxSpan = std::int64_t{1} << 27;

std::pair<std::int64_t, std::int64_t> populated_range(const Histogram& h, const char* op) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& [index, count] : h.counts()) {
        lo = std::min(lo, index);
        hi = std::max(hi, index);
    }
    if (hi - lo + 1 > kMaxSpan)
        throw computation_error(std::string(op) +
                                ": bin span too large; increase the bin width");
    return {lo, hi};
}

} // namespace

Density to_density(const Histogram& h) {
    if (h.total() == 0) throw computation_error("to_density: histogram is empty");
    const auto [lo, hi] = populated_range(h, "to_density");
    Density d;
    d.bin_width = h.bin_width();
    d.points.reserve(static_cast<std::size_t>(hi - lo + 1));
    const double norm = static_cast<double>(h.total()) * h.bin_width();
    for (std::int64_t i = lo; i <= hi; ++i) {
        const auto it = h.counts().find(i);
        const double count = it == h.counts().end() ? 0.0 : static_cast<double>(it->second);
        d.points.emplace_back(h.center(i), count / norm);
    }
    return d;
}

RankDistribution rank_order(const Histogram& h) {
    if (h.total() == 0) throw computation_error("rank_order: histogram is empty");
    auto bins = h.sorted_bins();
    std::stable_sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) {
        return a.second > b.second; // ties keep ascending index order
    });
    RankDistribution rd;
    rd.entries.reserve(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i)
        rd.entries.emplace_back(i + 1, bins[i].second);
    return rd;
}

std::vector<std::pair<double, std::uint64_t>> cumulative(const Histogram& h,
                                                         CumulativeDirection direction) {
    if (h.total() == 0) throw computation_error("cumulative: histogram is empty");
    const auto [lo, hi] = populated_range(h, "cumulative");
    const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::uint64_t> counts(n, 0);
    for (const auto& [index, count] : h.counts())
        counts[static_cast<std::size_t>(index - lo)] = count;

    std::vector<std::pair<double, std::uint64_t>> out(n);
    if (direction == CumulativeDirection::above) {
        std::uint64_t running = 0;
        for (std::size_t i = n; i-- > 0;) {
            running += counts[i];
            out[i] = {h.left_edge(lo + static_cast<std::int64_t>(i)), running};
        }
    } else {
        std::uint64_t running = 0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = {h.left_edge(lo + static_cast<std::int64_t>(i)), running};
            running += counts[i];
        }
    }
    return out;
}

} // namespace finmb
