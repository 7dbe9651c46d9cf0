#include "finmb/bars.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <numeric>
#include <ostream>

#include "finmb/errors.hpp"

namespace finmb {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(strip(line.substr(start)));
            break;
        }
        out.push_back(strip(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

bool looks_like_epoch(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// YYYY-MM-DD[T| ]HH:MM:SS[Z], or a bare date meaning midnight UTC.
bool parse_iso8601(const std::string& s, std::int64_t& out) {
    int y, mo, d, h = 0, mi = 0, se = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se);
    if (n == 3) {
        if (s.size() != 10) return false;
    } else if (n == 7) {
        if (sep != 'T' && sep != ' ') return false;
        std::size_t len = s.size();
        if (s.back() == 'Z') --len;
        if (len != 19) return false;
    } else {
        return false;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) return false;
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = se;
    const time_t t = timegm(&tm); // UTC, never local time
    if (t == static_cast<time_t>(-1)) return false;
    out = static_cast<std::int64_t>(t);
    return true;
}

bool parse_timestamp(const std::string& s, TimestampFormat fmt, std::int64_t& out) {
    switch (fmt) {
        case TimestampFormat::epoch_seconds:
            return parse_int(s, out);
        case TimestampFormat::iso8601:
            return parse_iso8601(s, out);
        case TimestampFormat::autodetect:
            return looks_like_epoch(s) ? parse_int(s, out) : parse_iso8601(s, out);
    }
    return false;
}

constexpr int kNumColumns = 6;
enum Col { kTs, kOpen, kHigh, kLow, kClose, kVolume };

int column_role(const std::string& name) {
    const std::string n = lower(name);
    if (n == "timestamp" || n == "ts" || n == "time" || n == "date" || n == "datetime") return kTs;
    if (n == "open" || n == "o") return kOpen;
    if (n == "high" || n == "h") return kHigh;
    if (n == "low" || n == "l") return kLow;
    if (n == "close" || n == "c") return kClose;
    if (n == "volume" || n == "vol" || n == "v") return kVolume;
    return -1;
}

const char* column_name(int role) {
    static const char* names[kNumColumns] = {"timestamp", "open", "high", "low", "close", "volume"};
    return names[role];
}

} // namespace

ParseResult parse_bars(std::istream& in, const ParseOptions& opts) {
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty input: header row required");

    char delim = opts.delimiter;
    if (delim == '\0') delim = line.find('\t') != std::string::npos ? '\t' : ',';

    const std::vector<std::string> header = split(line, delim);
    int position[kNumColumns];
    std::fill_n(position, kNumColumns, -1);
    for (std::size_t i = 0; i < header.size(); ++i) {
        const int role = column_role(header[i]);
        if (role >= 0 && position[role] < 0) position[role] = static_cast<int>(i);
    }
    for (int role = 0; role < kNumColumns; ++role)
        if (position[role] < 0)
            throw data_error(std::string("header missing required column: ") + column_name(role));

    ParseResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const std::vector<std::string> fields = split(line, delim);
        if (fields.size() < header.size()) {
            result.errors.push_back({line_no, "expected " + std::to_string(header.size()) +
                                                  " fields, got " + std::to_string(fields.size())});
            continue;
        }
        OhlcvBar bar;
        if (!parse_timestamp(fields[position[kTs]], opts.timestamp_format, bar.ts)) {
            result.errors.push_back({line_no, "unparseable timestamp: " + fields[position[kTs]]});
            continue;
        }
        double* const slots[5] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
        const int roles[5] = {kOpen, kHigh, kLow, kClose, kVolume};
        bool ok = true;
        for (int k = 0; k < 5 && ok; ++k) {
            const std::string& field = fields[position[roles[k]]];
            if (!parse_double(field, *slots[k]) || !std::isfinite(*slots[k])) {
                result.errors.push_back(
                    {line_no, std::string("unparseable ") + column_name(roles[k]) + ": " + field});
                ok = false;
            }
        }
        if (!ok) continue;
        if (bar.open < 0 || bar.high < 0 || bar.low < 0 || bar.close < 0) {
            result.errors.push_back({line_no, "negative price"});
            continue;
        }
        if (bar.volume < 0) {
            result.errors.push_back({line_no, "negative volume"});
            continue;
        }
        if (bar.low > bar.high || bar.open < bar.low || bar.open > bar.high ||
            bar.close < bar.low || bar.close > bar.high) {
            result.errors.push_back({line_no, "OHLC invariant violated"});
            continue;
        }
        result.bars.push_back(bar);
    }
    return result;
}

PriceSeries build_series(std::vector<OhlcvBar> bars, std::string instrument,
                         std::int64_t tau, double price_step, GapPolicy policy) {
    if (bars.empty()) throw data_error("build_series: no bars");
    if (tau <= 0) throw data_error("build_series: tau must be positive");
    if (!(price_step > 0)) throw data_error("build_series: price_step must be positive");

    std::stable_sort(bars.begin(), bars.end(),
                     [](const OhlcvBar& a, const OhlcvBar& b) { return a.ts < b.ts; });

    PriceSeries s;
    s.instrument = std::move(instrument);
    s.tau = tau;
    s.price_step = price_step;
    const std::size_t n = bars.size();
    s.ts.reserve(n);
    s.open.reserve(n);
    s.high.reserve(n);
    s.low.reserve(n);
    s.close.reserve(n);
    s.volume.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const std::int64_t dt = bars[i].ts - bars[i - 1].ts;
            if (dt == 0)
                throw data_error("duplicate timestamp " + std::to_string(bars[i].ts));
            if (dt % tau != 0)
                throw data_error("gap at t=" + std::to_string(bars[i].ts) +
                                 " is not a multiple of tau");
            if (dt != tau) {
                if (policy == GapPolicy::strict)
                    throw data_error("gap at t=" + std::to_string(bars[i].ts));
                ++s.gap_count;
            }
        }
        s.ts.push_back(bars[i].ts);
        s.open.push_back(bars[i].open);
        s.high.push_back(bars[i].high);
        s.low.push_back(bars[i].low);
        s.close.push_back(bars[i].close);
        s.volume.push_back(bars[i].volume);
    }
    return s;
}

PriceSeries resample(const PriceSeries& series, std::int64_t new_tau) {
    if (new_tau <= 0 || new_tau % series.tau != 0)
        throw data_error("resample: new_tau must be a positive multiple of tau");
    if (new_tau == series.tau) return series;

    PriceSeries out;
    out.instrument = series.instrument;
    out.tau = new_tau;
    out.price_step = series.price_step;

    auto window_of = [new_tau](std::int64_t t) {
        std::int64_t w = t / new_tau;
        if (t % new_tau != 0 && t < 0) --w; // floor division
        return w;
    };

    std::int64_t current = 0;
    bool open_window = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::int64_t w = window_of(series.ts[i]);
        if (!open_window || w != current) {
            out.ts.push_back(w * new_tau);
            out.open.push_back(series.open[i]);
            out.high.push_back(series.high[i]);
            out.low.push_back(series.low[i]);
            out.close.push_back(series.close[i]);
            out.volume.push_back(series.volume[i]);
            current = w;
            open_window = true;
        } else {
            out.high.back() = std::max(out.high.back(), series.high[i]);
            out.low.back() = std::min(out.low.back(), series.low[i]);
            out.close.back() = series.close[i];
            out.volume.back() += series.volume[i];
        }
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out.ts[i] - out.ts[i - 1] != new_tau) ++out.gap_count;
    return out;
}

void write_bars(std::ostream& out, const PriceSeries& series) {
    out << "timestamp,open,high,low,close,volume\n";
    char buf[192];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(series.ts[i]), series.open[i], series.high[i],
                      series.low[i], series.close[i], series.volume[i]);
        out << buf;
    }
}

} // namespace finmb
