#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace finmb {

// One OHLCV row. Timestamps are UTC epoch seconds; prices and volumes are
// non-negative finite reals with low <= open,close <= high.
struct OhlcvBar {
    std::int64_t ts = 0;
    double open = 0;
    double high = 0;
    double low = 0;
    double close = 0;
    double volume = 0;

    bool operator==(const OhlcvBar&) const = default;
};

struct RowError {
    std::size_t line; // 1-based, counting the header
    std::string reason;
};

struct ParseResult {
    std::vector<OhlcvBar> bars;
    std::vector<RowError> errors;
};

enum class TimestampFormat { autodetect, epoch_seconds, iso8601 };

struct ParseOptions {
    char delimiter = '\0'; // '\0' = detect comma vs tab from the header
    TimestampFormat timestamp_format = TimestampFormat::autodetect;
};

// Parses a delimited bar table. The header row must name timestamp, open,
// high, low, close and volume columns (any order, case-insensitive; ts/
// time/date[time] and vol are accepted aliases). Rows that fail to parse
// or violate the OHLC invariants are reported in `errors` with their line
// number, never silently dropped. A missing required column throws
// data_error.
ParseResult parse_bars(std::istream& in, const ParseOptions& opts = {});

enum class GapPolicy { strict, lenient };

// Bars of one instrument at a fixed sampling period, stored as parallel
// arrays (the derivative kernels read the columns directly). Timestamps
// are strictly increasing and consecutive differences are positive
// multiples of tau.
struct PriceSeries {
    std::string instrument;
    std::int64_t tau = 0;        // sampling period, seconds
    double price_step = 1e-5;    // smallest price increment
    std::vector<std::int64_t> ts;
    std::vector<double> open, high, low, close, volume;
    std::size_t gap_count = 0;   // consecutive pairs with spacing > tau

    std::size_t size() const { return ts.size(); }
    OhlcvBar bar(std::size_t i) const {
        return {ts[i], open[i], high[i], low[i], close[i], volume[i]};
    }
};

// Sorts bars by timestamp and validates spacing. Duplicate timestamps and
// gaps that are not positive multiples of tau are fatal under both
// policies; a gap that is a multiple of tau is fatal under `strict` and
// kept (counted) under `lenient`.
PriceSeries build_series(std::vector<OhlcvBar> bars, std::string instrument,
                         std::int64_t tau, double price_step, GapPolicy policy);

// Aggregates to a coarser period (new_tau a positive multiple of tau).
// Windows and output timestamps are aligned to epoch multiples of new_tau:
// open = first open, close = last close, high = max, low = min, volume =
// sum over the bars present in the window. new_tau == tau returns the
// series unchanged.
PriceSeries resample(const PriceSeries& series, std::int64_t new_tau);

// Writes the canonical bar table (epoch timestamps, 17-significant-digit
// floats); parse_bars round-trips it bit-exactly.
void write_bars(std::ostream& out, const PriceSeries& series);

} // namespace finmb
