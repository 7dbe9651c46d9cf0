#include "finmb/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "finmb/errors.hpp"
#include "finmb/rng.hpp"

namespace finmb {

PriceSeries generate_synthetic_series(const SyntheticConfig& cfg) {
    validate_scaling_params(cfg.params);
    if (!(cfg.support_lo > -1.0) || !(cfg.support_hi > cfg.support_lo))
        throw data_error("generate: return support must satisfy -1 < lo < hi");
    if (!(cfg.base_price > 0)) throw data_error("generate: base price must be positive");
    if (cfg.vol_min < 0 || cfg.vol_max < cfg.vol_min)
        throw data_error("generate: need 0 <= vol_min <= vol_max");
    if (!(cfg.params.tau > 0) || cfg.params.tau != std::floor(cfg.params.tau))
        throw data_error("generate: tau must be a positive integer number of seconds");

    PriceSeries s;
    s.instrument = cfg.instrument;
    s.tau = static_cast<std::int64_t>(cfg.params.tau);
    s.price_step = cfg.price_step;
    if (cfg.count == 0) return s;

    const ModelParams p = cfg.params;
    const auto returns = sample_from_density(
        [&p](double y) { return model_density_tau(y, p); }, cfg.support_lo, cfg.support_hi,
        cfg.count > 1 ? cfg.count - 1 : 0, cfg.seed);

    // Separate stream for volumes so return draws do not depend on the
    // volume configuration.
    Rng vol_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    const std::int64_t t0 = cfg.start_ts - (cfg.start_ts % s.tau + s.tau) % s.tau;
    s.ts.resize(cfg.count);
    s.open.resize(cfg.count);
    s.high.resize(cfg.count);
    s.low.resize(cfg.count);
    s.close.resize(cfg.count);
    s.volume.resize(cfg.count);

    double close = cfg.base_price;
    for (std::uint64_t i = 0; i < cfg.count; ++i) {
        const double open = close;
        if (i > 0) close = close * (1.0 + returns[i - 1]);
        s.ts[i] = t0 + static_cast<std::int64_t>(i) * s.tau;
        s.open[i] = open;
        s.close[i] = close;
        s.high[i] = std::max(open, close);
        s.low[i] = std::min(open, close);
        s.volume[i] = static_cast<double>(uniform_int(vol_rng, cfg.vol_min, cfg.vol_max));
    }
    return s;
}

} // namespace finmb
