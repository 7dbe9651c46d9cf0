#include "finmb/derive.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "finmb/errors.hpp"
#include "finmb/kernels.hpp"

namespace finmb {

DerivativeKind DerivativeKind::parse(const std::string& name, int theta, int phi) {
    std::string n;
    for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    DerivativeKind k;
    if (n == "d") k.tag = DerivativeTag::plain_return;
    else if (n == "r") k.tag = DerivativeTag::relative_return;
    else if (n == "w") k.tag = DerivativeTag::volume_change;
    else if (n == "omega" || n == "w_rel") k.tag = DerivativeTag::relative_volume_change;
    else if (n == "s") k.tag = DerivativeTag::simultaneous_ratio;
    else if (n == "general") {
        k.tag = DerivativeTag::general_ratio;
        if (theta == 0 || phi == 0)
            throw data_error("derivative kind 'general' requires nonzero --theta and --phi");
        k.theta = theta;
        k.phi = phi;
    } else {
        throw data_error("unknown derivative kind: " + name +
                         " (expected D, R, W, omega, S or general)");
    }
    return k;
}

std::string DerivativeKind::name() const {
    switch (tag) {
        case DerivativeTag::plain_return: return "D";
        case DerivativeTag::relative_return: return "R";
        case DerivativeTag::volume_change: return "W";
        case DerivativeTag::relative_volume_change: return "omega";
        case DerivativeTag::simultaneous_ratio: return "S";
        case DerivativeTag::general_ratio:
            return "general(theta=" + std::to_string(theta) + ",phi=" + std::to_string(phi) + ")";
    }
    return "?";
}

namespace {

void require_pairs(const PriceSeries& s, const char* op) {
    if (s.size() < 2) throw data_error(std::string(op) + ": series needs at least 2 bars");
}

// Applies `kernel` to all consecutive pairs of `column` in one shot, then
// keeps the results whose pair spacing is exactly tau and, when
// `denominator` is given, whose denominator is nonzero.
DerivativeSeries select_pairs(const PriceSeries& s, DerivativeKind kind,
                              const std::vector<double>& raw,
                              const std::vector<double>* denominator) {
    DerivativeSeries out;
    out.kind = kind;
    out.tau = s.tau;
    const std::size_t pairs = s.size() - 1;
    out.ts.reserve(pairs);
    out.value.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        if (s.ts[i + 1] - s.ts[i] != s.tau) {
            ++out.skipped.gap;
            continue;
        }
        if (denominator && (*denominator)[i] == 0.0) {
            ++out.skipped.zero_denominator;
            continue;
        }
        out.ts.push_back(s.ts[i + 1]);
        out.value.push_back(raw[i]);
    }
    return out;
}

std::vector<double> pair_diff(const std::vector<double>& col) {
    std::vector<double> raw(col.size() - 1);
    kernels::diff(col.data(), col.data() + 1, raw.data(), raw.size());
    return raw;
}

std::vector<double> pair_rel_diff(const std::vector<double>& col) {
    std::vector<double> raw(col.size() - 1);
    kernels::rel_diff(col.data(), col.data() + 1, raw.data(), raw.size());
    return raw;
}

} // namespace

DerivativeSeries plain_returns(const PriceSeries& s) {
    require_pairs(s, "plain_returns");
    return select_pairs(s, {DerivativeTag::plain_return}, pair_diff(s.close), nullptr);
}

DerivativeSeries relative_returns(const PriceSeries& s) {
    require_pairs(s, "relative_returns");
    return select_pairs(s, {DerivativeTag::relative_return}, pair_rel_diff(s.close), &s.close);
}

DerivativeSeries volume_changes(const PriceSeries& s) {
    require_pairs(s, "volume_changes");
    return select_pairs(s, {DerivativeTag::volume_change}, pair_diff(s.volume), nullptr);
}

DerivativeSeries relative_volume_changes(const PriceSeries& s) {
    require_pairs(s, "relative_volume_changes");
    return select_pairs(s, {DerivativeTag::relative_volume_change}, pair_rel_diff(s.volume),
                        &s.volume);
}

namespace {

// Shared loop for S and R^theta/omega^phi: both need R and omega per pair
// and skip gaps, zero previous close/volume, and omega = 0. `value_at`
// returns false to skip with a zero-denominator tally.
template <typename ValueAt>
DerivativeSeries ratio_series(const PriceSeries& s, DerivativeKind kind,
                              const std::vector<double>& w, ValueAt value_at) {
    DerivativeSeries out;
    out.kind = kind;
    out.tau = s.tau;
    const std::size_t pairs = s.size() - 1;
    out.ts.reserve(pairs);
    out.value.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        if (s.ts[i + 1] - s.ts[i] != s.tau) {
            ++out.skipped.gap;
            continue;
        }
        if (s.close[i] == 0.0 || s.volume[i] == 0.0 || w[i] == 0.0) {
            ++out.skipped.zero_denominator;
            continue;
        }
        double v;
        if (!value_at(i, v)) {
            ++out.skipped.zero_denominator;
            continue;
        }
        out.ts.push_back(s.ts[i + 1]);
        out.value.push_back(v);
    }
    return out;
}

void pair_ratios(const PriceSeries& s, std::vector<double>& r, std::vector<double>& w) {
    const std::size_t pairs = s.size() - 1;
    r.resize(pairs);
    w.resize(pairs);
    kernels::rel_diff(s.close.data(), s.close.data() + 1, r.data(), pairs);
    kernels::rel_diff(s.volume.data(), s.volume.data() + 1, w.data(), pairs);
}

} // namespace

DerivativeSeries simultaneous_ratios(const PriceSeries& s) {
    require_pairs(s, "simultaneous_ratios");
    std::vector<double> r, w;
    pair_ratios(s, r, w);
    std::vector<double> sv(r.size());
    kernels::ratio(r.data(), w.data(), sv.data(), sv.size());
    return ratio_series(s, {DerivativeTag::simultaneous_ratio}, w,
                        [&sv](std::size_t i, double& v) {
                            v = sv[i];
                            return true;
                        });
}

DerivativeSeries general_ratios(const PriceSeries& s, int theta, int phi) {
    require_pairs(s, "general_ratios");
    if (theta == 0 || phi == 0)
        throw data_error("general_ratios: theta and phi must be nonzero integers");
    std::vector<double> r, w;
    pair_ratios(s, r, w);
    DerivativeKind kind{DerivativeTag::general_ratio, theta, phi};
    const double th = theta, ph = phi;
    return ratio_series(s, kind, w, [&, th, ph, theta](std::size_t i, double& v) {
        if (r[i] == 0.0 && theta < 0) return false;
        v = std::pow(r[i], th) / std::pow(w[i], ph);
        return true;
    });
}

DerivativeSeries derive(const PriceSeries& s, const DerivativeKind& kind) {
    switch (kind.tag) {
        case DerivativeTag::plain_return: return plain_returns(s);
        case DerivativeTag::relative_return: return relative_returns(s);
        case DerivativeTag::volume_change: return volume_changes(s);
        case DerivativeTag::relative_volume_change: return relative_volume_changes(s);
        case DerivativeTag::simultaneous_ratio: return simultaneous_ratios(s);
        case DerivativeTag::general_ratio: return general_ratios(s, kind.theta, kind.phi);
    }
    throw data_error("derive: bad kind");
}

} // namespace finmb
