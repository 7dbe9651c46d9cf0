#pragma once

#include <cstdint>

#include "finmb/bars.hpp"
#include "finmb/model.hpp"

namespace finmb {

// Synthetic gap-free bar generation: closes are built by cumulating
// relative returns drawn from the scaling-form model density, so the
// derived R distribution follows it by construction. Volumes are uniform
// integers in [vol_min, vol_max].
struct SyntheticConfig {
    ModelParams params;          // scaling form (y = 0, b_min = 0, C/alpha/tau)
    std::uint64_t count = 0;     // number of bars
    std::uint64_t seed = 1;
    double support_lo = -0.2;    // return draw support, must stay > -1
    double support_hi = 0.2;
    double base_price = 1.0;
    std::int64_t start_ts = 1325376000; // 2012-01-01T00:00:00Z
    std::int64_t vol_min = 1;
    std::int64_t vol_max = 1000;
    std::string instrument = "SYNTH";
    double price_step = 1e-5;
};

PriceSeries generate_synthetic_series(const SyntheticConfig& cfg);

} // namespace finmb
