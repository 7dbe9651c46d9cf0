#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finmb/bars.hpp"

namespace finmb {

enum class DerivativeTag {
    plain_return,           // D: close(t) - close(t-tau)
    relative_return,        // R: D / close(t-tau)
    volume_change,          // W: V(t) - V(t-tau)
    relative_volume_change, // omega: W / V(t-tau)
    simultaneous_ratio,     // S: R / omega
    general_ratio,          // R^theta / omega^phi
};

struct DerivativeKind {
    DerivativeTag tag = DerivativeTag::plain_return;
    int theta = 0; // general_ratio only, nonzero
    int phi = 0;   // general_ratio only, nonzero

    // Accepts D, R, W, omega, S or general (case-insensitive).
    static DerivativeKind parse(const std::string& name, int theta = 0, int phi = 0);
    std::string name() const;
};

struct SkipTally {
    std::uint64_t gap = 0;              // pair spans a gap (spacing != tau)
    std::uint64_t zero_denominator = 0; // a required denominator was zero
    std::uint64_t total() const { return gap + zero_denominator; }
};

struct DerivativeSeries {
    DerivativeKind kind;
    std::int64_t tau = 0;
    std::vector<std::int64_t> ts; // per point: the later bar's timestamp
    std::vector<double> value;
    SkipTally skipped;

    std::size_t size() const { return ts.size(); }
};

// Each op evaluates one value per consecutive bar pair whose spacing is
// exactly tau; pairs across gaps and pairs with a zero denominator are
// skipped and tallied, so |points| + skipped = N - 1 always holds.
DerivativeSeries plain_returns(const PriceSeries& s);
DerivativeSeries relative_returns(const PriceSeries& s);
DerivativeSeries volume_changes(const PriceSeries& s);
DerivativeSeries relative_volume_changes(const PriceSeries& s);
DerivativeSeries simultaneous_ratios(const PriceSeries& s);
// R^theta / omega^phi with the simultaneous-ratio skip rules, plus a skip
// where R = 0 and theta < 0.
DerivativeSeries general_ratios(const PriceSeries& s, int theta, int phi);

DerivativeSeries derive(const PriceSeries& s, const DerivativeKind& kind);

} // namespace finmb
