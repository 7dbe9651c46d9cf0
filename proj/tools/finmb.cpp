// finmb command-line tool: bar ingestion, derivative series, histograms,
// rank/cumulative tables, partition-function simulation, sampling,
// power-law fits, scaling-law fits and distribution collapsing, wired as
// file-to-file stages plus a config-driven pipeline with a run manifest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finmb/bars.hpp"
#include "finmb/collapse.hpp"
#include "finmb/derive.hpp"
#include "finmb/errors.hpp"
#include "finmb/fit.hpp"
#include "finmb/histogram.hpp"
#include "finmb/kernels.hpp"
#include "finmb/model.hpp"
#include "finmb/synthetic.hpp"
#include "finmb/table_io.hpp"
#include "finmb/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace finmb;

namespace {

// ---------------------------------------------------------------------
// small flag parsers

std::pair<double, double> parse_range(const std::string& s, const char* what) {
    double lo, hi;
    char c;
    std::istringstream ss(s);
    if (!(ss >> lo >> c >> hi) || c != ':' || !(hi > lo))
        throw data_error(std::string(what) + ": expected lo:hi with hi > lo, got '" + s + "'");
    return {lo, hi};
}

struct GridSpec {
    double lo = 0, hi = 0;
    std::size_t steps = 0;
    bool log_spacing = false;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    std::string spacing;
    std::istringstream ss(s);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4)
        throw data_error("--y-grid: expected lo:hi:steps[:log|lin], got '" + s + "'");
    try {
        g.lo = std::stod(parts[0]);
        g.hi = std::stod(parts[1]);
        g.steps = static_cast<std::size_t>(std::stoull(parts[2]));
    } catch (const std::exception&) {
        throw data_error("--y-grid: bad number in '" + s + "'");
    }
    if (parts.size() == 4) {
        if (parts[3] == "log") g.log_spacing = true;
        else if (parts[3] != "lin")
            throw data_error("--y-grid: spacing must be log or lin");
    }
    if (!(g.hi > g.lo) || g.steps < 2) throw data_error("--y-grid: need hi > lo and steps >= 2");
    if (g.log_spacing && !(g.lo > 0)) throw data_error("--y-grid: log spacing needs lo > 0");
    return g;
}

std::vector<double> make_grid(const GridSpec& g) {
    std::vector<double> ys(g.steps);
    if (g.log_spacing) {
        const double llo = std::log(g.lo), lhi = std::log(g.hi);
        for (std::size_t i = 0; i < g.steps; ++i)
            ys[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                       static_cast<double>(g.steps - 1));
    } else {
        for (std::size_t i = 0; i < g.steps; ++i)
            ys[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) /
                               static_cast<double>(g.steps - 1);
    }
    return ys;
}

GapPolicy parse_gap_policy(const std::string& s) {
    if (s == "strict") return GapPolicy::strict;
    if (s == "lenient") return GapPolicy::lenient;
    throw data_error("--gap-policy must be strict or lenient");
}

TimestampFormat parse_ts_format(const std::string& s) {
    if (s == "auto") return TimestampFormat::autodetect;
    if (s == "epoch") return TimestampFormat::epoch_seconds;
    if (s == "iso8601") return TimestampFormat::iso8601;
    throw data_error("--timestamp-format must be auto, epoch or iso8601");
}

// ---------------------------------------------------------------------
// model parameter plumbing

ModelParams params_from_json(const json& j) {
    ModelParams p;
    if (j.contains("n")) p.n = j.at("n").get<double>();
    if (j.contains("y")) p.y = j.at("y").get<double>();
    if (j.contains("beta")) p.beta = j.at("beta").get<double>();
    if (j.contains("b_min")) p.b_min = j.at("b_min").get<double>();
    if (j.contains("b_max")) p.b_max = j.at("b_max").get<double>();
    if (j.contains("C")) p.C = j.at("C").get<double>();
    if (j.contains("alpha")) p.alpha = j.at("alpha").get<double>();
    if (j.contains("tau")) p.tau = j.at("tau").get<double>();
    return p;
}

json params_to_json(const ModelParams& p) {
    return json{{"n", p.n},         {"y", p.y},     {"beta", p.beta}, {"b_min", p.b_min},
                {"b_max", p.b_max}, {"C", p.C},     {"alpha", p.alpha}, {"tau", p.tau}};
}

// ---------------------------------------------------------------------
// series loading shared by derive/pipeline

struct IngestOptions {
    std::string instrument = "UNKNOWN";
    std::int64_t tau = 60;
    double price_step = 1e-5;
    std::string gap_policy = "lenient";
    std::string timestamp_format = "auto";
};

PriceSeries load_series(const fs::path& path, const IngestOptions& opt) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path.string());
    ParseOptions popts;
    popts.timestamp_format = parse_ts_format(opt.timestamp_format);
    ParseResult parsed = parse_bars(in, popts);
    for (const auto& e : parsed.errors)
        std::cerr << path.string() << ":" << e.line << ": " << e.reason << "\n";
    if (!parsed.errors.empty())
        std::cerr << path.string() << ": " << parsed.errors.size() << " row(s) rejected\n";
    return build_series(std::move(parsed.bars), opt.instrument, opt.tau, opt.price_step,
                        parse_gap_policy(opt.gap_policy));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// Default histogram width: the price step for absolute derivatives, the
// price step over a typical (median) price for relative ones. Ratio kinds
// have no natural scale and require an explicit width.
std::optional<double> suggested_bin_width(const DerivativeKind& kind, const PriceSeries& s) {
    switch (kind.tag) {
        case DerivativeTag::plain_return:
            return s.price_step;
        case DerivativeTag::volume_change:
            return 1.0; // volumes are tick counts
        case DerivativeTag::relative_return:
        case DerivativeTag::relative_volume_change: {
            const double typical = median_of(kind.tag == DerivativeTag::relative_return
                                                 ? s.close
                                                 : s.volume);
            if (typical > 0) return s.price_step / typical;
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

void write_derivative_outputs(const fs::path& out_path, const DerivativeSeries& d,
                              std::optional<double> bin_width_hint) {
    std::vector<std::pair<std::int64_t, double>> rows(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) rows[i] = {d.ts[i], d.value[i]};
    write_table(out_path, "timestamp,value", rows);
    json meta{{"kind", d.kind.name()},
              {"tau", d.tau},
              {"n_points", d.size()},
              {"skipped", {{"gap", d.skipped.gap}, {"zero_denominator", d.skipped.zero_denominator}}}};
    if (bin_width_hint) meta["suggested_bin_width"] = *bin_width_hint;
    write_sidecar(out_path, meta);
    std::cerr << "derive " << d.kind.name() << ": " << d.size() << " points, skipped gap="
              << d.skipped.gap << " zero_denominator=" << d.skipped.zero_denominator << "\n";
}

// ---------------------------------------------------------------------
// histogram plumbing shared by hist/rank/cdf/pipeline

struct BinningOptions {
    double bin_width = 0; // 0 = take the input sidecar's suggestion
    double origin = std::numeric_limits<double>::quiet_NaN(); // NaN = -width/2
    bool magnitude = false;
};

double resolve_bin_width(const BinningOptions& opt, const fs::path& input) {
    if (opt.bin_width > 0) return opt.bin_width;
    const fs::path side = sidecar_path(input);
    if (fs::exists(side)) {
        const json meta = read_json_file(side);
        if (meta.contains("suggested_bin_width"))
            return meta.at("suggested_bin_width").get<double>();
    }
    throw data_error("no --bin-width given and no suggestion in " + side.string());
}

Histogram build_histogram(std::span<const double> values, const BinningOptions& opt,
                          double width) {
    if (opt.magnitude) {
        if (!std::isnan(opt.origin))
            throw data_error("magnitude histograms fix the origin at 0");
        return magnitude_histogram(values, width);
    }
    const double origin = std::isnan(opt.origin) ? -width / 2 : opt.origin;
    return histogram(values, width, origin);
}

std::vector<double> load_derivative_values(const fs::path& path) {
    const auto rows = read_two_column(path);
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i].second;
    return values;
}

json geometry_meta(const Histogram& h, bool magnitude) {
    return json{{"bin_width", h.bin_width()},
                {"origin", h.origin()},
                {"total", h.total()},
                {"magnitude", magnitude},
                {"zero_centered_origin", !magnitude}};
}

void write_histogram_table(const fs::path& path, const Histogram& h, bool as_density,
                           bool magnitude) {
    if (as_density) {
        const Density d = to_density(h);
        write_table(path, "Y,density", d.points);
    } else {
        std::vector<std::pair<double, std::uint64_t>> rows;
        for (const auto& [index, count] : h.sorted_bins())
            rows.emplace_back(h.center(index), count);
        write_table(path, "Y,count", rows);
    }
    json meta = geometry_meta(h, magnitude);
    meta["density"] = as_density;
    write_sidecar(path, meta);
}

Density load_density(const fs::path& path) {
    Density d;
    d.points = read_two_column(path);
    const fs::path side = sidecar_path(path);
    if (fs::exists(side)) {
        const json meta = read_json_file(side);
        if (meta.contains("bin_width")) d.bin_width = meta.at("bin_width").get<double>();
        if (meta.contains("density") && !meta.at("density").get<bool>())
            throw data_error(path.string() + " holds counts, not a density (rerun with --density)");
    }
    if (!(d.bin_width > 0) && d.points.size() >= 2)
        d.bin_width = d.points[1].first - d.points[0].first;
    if (!(d.bin_width > 0)) throw data_error("cannot determine bin width of " + path.string());
    return d;
}

// ---------------------------------------------------------------------
// fit output

json fit_to_json(const FitResult& r) {
    json j{{"params", r.params},
           {"std_errors", r.std_errors},
           {"adj_r_squared", r.adj_r_squared},
           {"n_points", r.n_points},
           {"fit_range", {r.fit_range.lo, r.fit_range.hi}},
           {"dropped", r.dropped}};
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

// Flat text block in the Table-3 conventions: value / se per parameter,
// ars for the adjusted coefficient of determination.
std::string fit_to_text(const FitResult& r) {
    std::string out = "property,value,se\n";
    for (const auto& [name, value] : r.params) {
        out += name + "," + format_double(value) + "," +
               format_double(r.std_errors.at(name)) + "\n";
    }
    out += "ars," + format_double(r.adj_r_squared) + ",\n";
    out += "n," + std::to_string(r.n_points) + ",\n";
    return out;
}

void emit_fit(const FitResult& r, const std::string& output) {
    if (!output.empty()) {
        write_text_file(output, fit_to_json(r).dump(2) + "\n");
        write_text_file(output + ".txt", fit_to_text(r));
    }
    std::cout << fit_to_text(r);
    if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
}

// ---------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string form;
    std::string y_grid;
    double x_power = 1.0;
    std::uint64_t J = 1000;
    double b_min = 0, b_max = 1;
    double B = 1;
    std::uint64_t seed = 1;
    bool infinite = false;
    ModelParams params;
    std::string output;
};

int cmd_simulate(const SimulateOptions& o) {
    const GridSpec grid = parse_grid(o.y_grid);
    const std::vector<double> ys = make_grid(grid);

    std::function<double(double)> z;
    const double p = o.x_power;
    auto x_of = [p](double y) { return std::pow(y, p); };
    if (p != std::floor(p) && grid.lo <= 0)
        throw data_error("simulate: fractional --x-power needs a positive Y grid");

    if (o.form == "finite-sum") {
        auto bset = std::make_shared<BSet>(sample_bset_uniform(o.J, o.b_min, o.b_max, o.seed));
        z = [bset, x_of](double y) { return partition_sum(*bset, x_of(y)); };
    } else if (o.form == "uniform") {
        const double lo = o.b_min, hi = o.b_max;
        z = [lo, hi, x_of](double y) { return z_uniform_closed(lo, hi, x_of(y)); };
    } else if (o.form == "geometric") {
        const double B = o.B;
        const std::uint64_t J = o.infinite ? kInfiniteJ : o.J;
        z = [B, J, x_of](double y) { return z_geometric_closed(B, x_of(y), J); };
    } else if (o.form == "bose") {
        const ModelParams mp = o.params;
        const double B = o.B;
        z = [B, mp](double y) { return bose_density(y, B, mp.beta, mp.y); };
    } else if (o.form == "eq28") {
        const ModelParams mp = o.params;
        validate_shape_params(mp);
        z = [mp](double y) { return model_density(y, mp); };
    } else if (o.form == "eq31") {
        const ModelParams mp = o.params;
        validate_scaling_params(mp);
        z = [mp](double y) { return model_density_tau(y, mp); };
    } else {
        throw data_error("simulate: unknown --form " + o.form);
    }

    std::vector<std::pair<double, double>> rows(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) rows[i] = {ys[i], z(ys[i])};
    write_table(o.output, "Y,Z", rows);
    json meta{{"form", o.form}, {"x_power", o.x_power}, {"grid", o.y_grid}};
    if (o.form == "finite-sum") {
        meta["J"] = o.J;
        meta["b_min"] = o.b_min;
        meta["b_max"] = o.b_max;
        meta["seed"] = o.seed;
    } else if (o.form == "uniform") {
        meta["b_min"] = o.b_min;
        meta["b_max"] = o.b_max;
    } else if (o.form == "geometric") {
        meta["B"] = o.B;
        meta["J"] = o.infinite ? json(nullptr) : json(o.J);
    } else {
        meta["params"] = params_to_json(o.params);
        if (o.form == "bose") meta["B"] = o.B;
    }
    write_sidecar(o.output, meta);
    return 0;
}

// ---------------------------------------------------------------------
// sample

struct SampleOptions {
    std::string form = "eq31";
    ModelParams params;
    std::string support;
    std::uint64_t count = 0;
    std::uint64_t seed = 1;
    std::uint64_t grid_cells = 1u << 16;
    std::string output;
};

int cmd_sample(const SampleOptions& o) {
    const auto [lo, hi] = parse_range(o.support, "--support");
    std::function<double(double)> density;
    if (o.form == "eq28") {
        const ModelParams p = o.params;
        validate_shape_params(p);
        density = [p](double y) { return model_density(y, p); };
    } else if (o.form == "eq31") {
        const ModelParams p = o.params;
        validate_scaling_params(p);
        density = [p](double y) { return model_density_tau(y, p); };
    } else {
        throw data_error("sample: unknown --form " + o.form);
    }
    const auto draws = sample_from_density(density, lo, hi, o.count, o.seed, o.grid_cells);
    std::string content = "value\n";
    for (const double v : draws) {
        content += format_double(v);
        content += '\n';
    }
    write_text_file(o.output, content);
    write_sidecar(o.output, json{{"form", o.form},
                                 {"params", params_to_json(o.params)},
                                 {"support", {lo, hi}},
                                 {"count", o.count},
                                 {"seed", o.seed},
                                 {"grid_cells", o.grid_cells}});
    return 0;
}

// ---------------------------------------------------------------------
// collapse

int cmd_collapse(const std::string& method, const fs::path& density_path,
                 const fs::path& params_path, const std::string& region_spec,
                 const std::string& output) {
    const Density density = load_density(density_path);
    const ModelParams params = params_from_json(read_json_file(params_path));
    std::optional<FitRange> region;
    if (!region_spec.empty()) {
        const auto [lo, hi] = parse_range(region_spec, "--region");
        region = FitRange{lo, hi};
    }

    CollapseResult res;
    if (method == "unity") {
        res = collapse_unity(density, params, region);
    } else if (method == "ratio") {
        ModelParams p = params;
        if (p.C > 0 && p.alpha > 0 && p.tau > 0) {
            validate_scaling_params(p);
            res = collapse_ratio(density, [p](double y) { return model_density_tau(y, p); },
                                 region);
        } else {
            validate_shape_params(p);
            res = collapse_ratio(density, [p](double y) { return model_density(y, p); }, region);
        }
    } else {
        throw data_error("collapse: --method must be unity or ratio");
    }

    write_table(output, "Y,collapsed", res.points);
    write_sidecar(output, json{{"method", method},
                               {"flatness", res.flatness},
                               {"region", {res.region.lo, res.region.hi}},
                               {"rescale_factor", res.rescale_factor},
                               {"excluded", res.excluded},
                               {"params", params_to_json(params)}});
    std::cout << "flatness " << format_double(res.flatness) << " over ["
              << format_double(res.region.lo) << ", " << format_double(res.region.hi) << "]\n";
    return 0;
}

// ---------------------------------------------------------------------
// generate

SyntheticConfig synthetic_from_json(const json& j) {
    SyntheticConfig cfg;
    if (j.contains("params")) cfg.params = params_from_json(j.at("params"));
    if (j.contains("count")) cfg.count = j.at("count").get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("support")) {
        cfg.support_lo = j.at("support").at(0).get<double>();
        cfg.support_hi = j.at("support").at(1).get<double>();
    }
    if (j.contains("base_price")) cfg.base_price = j.at("base_price").get<double>();
    if (j.contains("start_ts")) cfg.start_ts = j.at("start_ts").get<std::int64_t>();
    if (j.contains("vol_min")) cfg.vol_min = j.at("vol_min").get<std::int64_t>();
    if (j.contains("vol_max")) cfg.vol_max = j.at("vol_max").get<std::int64_t>();
    if (j.contains("instrument")) cfg.instrument = j.at("instrument").get<std::string>();
    if (j.contains("price_step")) cfg.price_step = j.at("price_step").get<double>();
    return cfg;
}

json synthetic_to_json(const SyntheticConfig& cfg) {
    return json{{"params", params_to_json(cfg.params)},
                {"count", cfg.count},
                {"seed", cfg.seed},
                {"support", {cfg.support_lo, cfg.support_hi}},
                {"base_price", cfg.base_price},
                {"start_ts", cfg.start_ts},
                {"vol_min", cfg.vol_min},
                {"vol_max", cfg.vol_max},
                {"instrument", cfg.instrument},
                {"price_step", cfg.price_step}};
}

int cmd_generate(const SyntheticConfig& cfg, const std::string& output) {
    const PriceSeries s = generate_synthetic_series(cfg);
    std::ostringstream out;
    write_bars(out, s);
    write_text_file(output, out.str());
    write_sidecar(output, synthetic_to_json(cfg));
    return 0;
}

// ---------------------------------------------------------------------
// pipeline

struct RunConfig {
    std::vector<std::string> inputs;
    std::optional<SyntheticConfig> generate;
    IngestOptions ingest;
    std::string kind = "R";
    int theta = 0, phi = 0;
    BinningOptions binning;
    bool density = true;
    std::optional<FitRange> fit_range;
    std::optional<json> collapse; // {"method":..., "params":{...}, "region":[lo,hi]}
    std::string output_dir = "out";
    std::string format = "csv";
};

RunConfig config_from_json(const json& cfg) {
    RunConfig rc;
    if (cfg.contains("inputs")) rc.inputs = cfg.at("inputs").get<std::vector<std::string>>();
    if (cfg.contains("generate")) rc.generate = synthetic_from_json(cfg.at("generate"));
    if (cfg.contains("instrument")) rc.ingest.instrument = cfg.at("instrument").get<std::string>();
    if (cfg.contains("tau")) rc.ingest.tau = cfg.at("tau").get<std::int64_t>();
    if (cfg.contains("price_step")) rc.ingest.price_step = cfg.at("price_step").get<double>();
    if (cfg.contains("gap_policy")) rc.ingest.gap_policy = cfg.at("gap_policy").get<std::string>();
    if (cfg.contains("timestamp_format"))
        rc.ingest.timestamp_format = cfg.at("timestamp_format").get<std::string>();
    if (cfg.contains("derivative")) {
        const json& d = cfg.at("derivative");
        rc.kind = d.value("kind", "R");
        rc.theta = d.value("theta", 0);
        rc.phi = d.value("phi", 0);
    }
    if (cfg.contains("hist")) {
        const json& h = cfg.at("hist");
        rc.binning.bin_width = h.value("bin_width", 0.0);
        if (h.contains("origin") && !h.at("origin").is_null())
            rc.binning.origin = h.at("origin").get<double>();
        rc.binning.magnitude = h.value("magnitude", false);
    }
    if (cfg.contains("fit")) {
        const json& f = cfg.at("fit");
        rc.fit_range = FitRange{f.at("range").at(0).get<double>(),
                                f.at("range").at(1).get<double>()};
    }
    if (cfg.contains("collapse")) rc.collapse = cfg.at("collapse");
    if (cfg.contains("output_dir")) rc.output_dir = cfg.at("output_dir").get<std::string>();
    if (cfg.contains("format")) rc.format = cfg.at("format").get<std::string>();
    if (rc.format != "csv" && rc.format != "json")
        throw data_error("config: format must be csv or json");
    if (rc.inputs.empty() && !rc.generate)
        throw data_error("config: needs either inputs[] or generate{}");
    return rc;
}

json config_to_json(const RunConfig& rc) {
    json cfg;
    if (!rc.inputs.empty()) cfg["inputs"] = rc.inputs;
    if (rc.generate) cfg["generate"] = synthetic_to_json(*rc.generate);
    cfg["instrument"] = rc.ingest.instrument;
    cfg["tau"] = rc.ingest.tau;
    cfg["price_step"] = rc.ingest.price_step;
    cfg["gap_policy"] = rc.ingest.gap_policy;
    cfg["timestamp_format"] = rc.ingest.timestamp_format;
    cfg["derivative"] = json{{"kind", rc.kind}, {"theta", rc.theta}, {"phi", rc.phi}};
    json hist{{"bin_width", rc.binning.bin_width}, {"magnitude", rc.binning.magnitude}};
    hist["origin"] = std::isnan(rc.binning.origin) ? json(nullptr) : json(rc.binning.origin);
    cfg["hist"] = hist;
    if (rc.fit_range) cfg["fit"] = json{{"range", {rc.fit_range->lo, rc.fit_range->hi}}};
    if (rc.collapse) cfg["collapse"] = *rc.collapse;
    cfg["output_dir"] = rc.output_dir;
    cfg["format"] = rc.format;
    return cfg;
}

int cmd_pipeline(const RunConfig& rc) {
    const fs::path out_dir(rc.output_dir);
    fs::create_directories(out_dir);
    const DerivativeKind kind = DerivativeKind::parse(rc.kind, rc.theta, rc.phi);

    json manifest;
    manifest["version"] = kVersion;
    const json cfg_json = config_to_json(rc);
    manifest["config"] = cfg_json;
    manifest["config_hash"] = fnv1a_hex(cfg_json.dump());
    manifest["backend"] =
        kernels::active_backend() == kernels::Backend::avx2 ? "avx2" : "scalar";
    manifest["inputs"] = json::array();
    std::vector<std::string> outputs;

    // Assemble the per-shard series: either parsed input files or one
    // generated series.
    std::vector<PriceSeries> shards;
    if (rc.generate) {
        shards.push_back(generate_synthetic_series(*rc.generate));
    } else {
        for (const std::string& input : rc.inputs) {
            if (!fs::exists(input)) throw data_error("missing input file: " + input);
            manifest["inputs"].push_back(json{{"path", input}, {"hash", hash_file(input)}});
            shards.push_back(load_series(input, rc.ingest));
        }
    }

    double width = rc.binning.bin_width;
    if (!(width > 0)) {
        if (shards.size() > 1)
            throw data_error("config: hist.bin_width is required with multiple inputs");
        const auto hint = suggested_bin_width(kind, shards.front());
        if (!hint)
            throw data_error("config: hist.bin_width is required for kind " + kind.name());
        width = *hint;
    }
    const double origin =
        rc.binning.magnitude ? 0.0 : (std::isnan(rc.binning.origin) ? -width / 2 : rc.binning.origin);

    Histogram hist(width, rc.binning.magnitude ? 0.0 : origin);
    SkipTally skipped;
    std::uint64_t n_values = 0;
    for (std::size_t i = 0; i < shards.size(); ++i) {
        const DerivativeSeries d = derive(shards[i], kind);
        const fs::path dpath = out_dir / ("derivative_" + std::to_string(i) + ".csv");
        write_derivative_outputs(dpath, d, width);
        outputs.push_back(dpath.filename().string());
        if (rc.binning.magnitude) {
            std::vector<double> mags(d.value.size());
            kernels::abs_values(d.value.data(), mags.data(), mags.size());
            hist.add_values(mags);
        } else {
            hist.add_values(d.value);
        }
        skipped.gap += d.skipped.gap;
        skipped.zero_denominator += d.skipped.zero_denominator;
        n_values += d.size();
    }
    if (hist.total() == 0) throw computation_error("pipeline: no derivative values survived");

    const fs::path hist_path = out_dir / ("hist." + rc.format);
    if (rc.format == "json") {
        json rows = json::array();
        for (const auto& [index, count] : hist.sorted_bins())
            rows.push_back({hist.center(index), count});
        json doc{{"columns", {"Y", "count"}}, {"rows", rows}};
        write_text_file(hist_path, doc.dump(2) + "\n");
        json meta = geometry_meta(hist, rc.binning.magnitude);
        write_sidecar(hist_path, meta);
    } else {
        write_histogram_table(hist_path, hist, false, rc.binning.magnitude);
    }
    outputs.push_back(hist_path.filename().string());

    const fs::path density_path = out_dir / "density.csv";
    const Density density = to_density(hist);
    write_table(density_path, "Y,density", density.points);
    json dmeta = geometry_meta(hist, rc.binning.magnitude);
    dmeta["density"] = true;
    write_sidecar(density_path, dmeta);
    outputs.push_back(density_path.filename().string());

    if (rc.fit_range) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [index, count] : hist.sorted_bins())
            pts.emplace_back(hist.center(index), static_cast<double>(count));
        const FitResult fr = fit_loglog_slope(pts, *rc.fit_range);
        const fs::path fit_path = out_dir / "fit.json";
        write_text_file(fit_path, fit_to_json(fr).dump(2) + "\n");
        write_text_file(out_dir / "fit.txt", fit_to_text(fr));
        outputs.push_back("fit.json");
        outputs.push_back("fit.txt");
    }

    if (rc.collapse) {
        const json& cj = *rc.collapse;
        const std::string method = cj.value("method", "unity");
        const ModelParams params = params_from_json(cj.at("params"));
        std::optional<FitRange> region;
        if (cj.contains("region"))
            region = FitRange{cj.at("region").at(0).get<double>(),
                              cj.at("region").at(1).get<double>()};
        CollapseResult res;
        if (method == "unity") {
            res = collapse_unity(density, params, region);
        } else if (method == "ratio") {
            ModelParams p = params;
            validate_scaling_params(p);
            res = collapse_ratio(density, [p](double y) { return model_density_tau(y, p); },
                                 region);
        } else {
            throw data_error("config: collapse.method must be unity or ratio");
        }
        const fs::path cpath = out_dir / "collapse.csv";
        write_table(cpath, "Y,collapsed", res.points);
        write_sidecar(cpath, json{{"method", method},
                                  {"flatness", res.flatness},
                                  {"region", {res.region.lo, res.region.hi}},
                                  {"rescale_factor", res.rescale_factor},
                                  {"excluded", res.excluded}});
        outputs.push_back("collapse.csv");
    }

    manifest["stats"] = json{{"values", n_values},
                             {"skipped_gap", skipped.gap},
                             {"skipped_zero_denominator", skipped.zero_denominator},
                             {"hist_total", hist.total()}};
    manifest["outputs"] = outputs;
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"financial derivative distributions and partition-function model toolkit"};
    app.require_subcommand(1);

    int rc = 0;

    // ---- derive
    struct {
        std::string input, output, kind = "R";
        int theta = 0, phi = 0;
        IngestOptions ingest;
    } dv;
    auto* derive_cmd = app.add_subcommand("derive", "compute a derivative series from a bar file");
    derive_cmd->add_option("--input", dv.input, "bar file")->required();
    derive_cmd->add_option("--output", dv.output, "derivative table")->required();
    derive_cmd->add_option("--kind", dv.kind, "D|R|W|omega|S|general");
    derive_cmd->add_option("--theta", dv.theta, "exponent of R (kind=general)");
    derive_cmd->add_option("--phi", dv.phi, "exponent of omega (kind=general)");
    derive_cmd->add_option("--instrument", dv.ingest.instrument, "symbol");
    derive_cmd->add_option("--tau", dv.ingest.tau, "sampling period, seconds");
    derive_cmd->add_option("--price-step", dv.ingest.price_step, "smallest price increment");
    derive_cmd->add_option("--gap-policy", dv.ingest.gap_policy, "strict|lenient");
    derive_cmd->add_option("--timestamp-format", dv.ingest.timestamp_format,
                           "auto|epoch|iso8601");
    derive_cmd->callback([&] {
        const DerivativeKind kind = DerivativeKind::parse(dv.kind, dv.theta, dv.phi);
        const PriceSeries s = load_series(dv.input, dv.ingest);
        const DerivativeSeries d = derive(s, kind);
        write_derivative_outputs(dv.output, d, suggested_bin_width(kind, s));
        rc = 0;
    });

    // ---- hist / rank / cdf
    struct {
        std::string input, output;
        BinningOptions binning;
        bool density = false;
    } hi;
    auto* hist_cmd = app.add_subcommand("hist", "histogram a derivative file");
    hist_cmd->add_option("--input", hi.input)->required();
    hist_cmd->add_option("--output", hi.output)->required();
    hist_cmd->add_option("--bin-width", hi.binning.bin_width);
    hist_cmd->add_option("--origin", hi.binning.origin, "left edge of bin 0 (default -width/2)");
    hist_cmd->add_flag("--magnitude", hi.binning.magnitude, "histogram |value| with origin 0");
    hist_cmd->add_flag("--density", hi.density, "emit normalized density instead of counts");
    hist_cmd->callback([&] {
        const auto values = load_derivative_values(hi.input);
        const double width = resolve_bin_width(hi.binning, hi.input);
        const Histogram h = build_histogram(values, hi.binning, width);
        write_histogram_table(hi.output, h, hi.density, hi.binning.magnitude);
        rc = 0;
    });

    struct {
        std::string input, output;
        BinningOptions binning;
    } rk;
    auto* rank_cmd = app.add_subcommand("rank", "rank-ordered bin frequencies");
    rank_cmd->add_option("--input", rk.input)->required();
    rank_cmd->add_option("--output", rk.output)->required();
    rank_cmd->add_option("--bin-width", rk.binning.bin_width);
    rank_cmd->add_option("--origin", rk.binning.origin);
    rank_cmd->add_flag("--magnitude", rk.binning.magnitude);
    rank_cmd->callback([&] {
        const auto values = load_derivative_values(rk.input);
        const double width = resolve_bin_width(rk.binning, rk.input);
        const Histogram h = build_histogram(values, rk.binning, width);
        const RankDistribution rd = rank_order(h);
        write_table(rk.output, "rank,frequency", rd.entries);
        write_sidecar(rk.output, geometry_meta(h, rk.binning.magnitude));
        rc = 0;
    });

    struct {
        std::string input, output, direction = "above";
        BinningOptions binning;
    } cd;
    auto* cdf_cmd = app.add_subcommand("cdf", "cumulative counts per bin edge");
    cdf_cmd->add_option("--input", cd.input)->required();
    cdf_cmd->add_option("--output", cd.output)->required();
    cdf_cmd->add_option("--direction", cd.direction, "above|below");
    cdf_cmd->add_option("--bin-width", cd.binning.bin_width);
    cdf_cmd->add_option("--origin", cd.binning.origin);
    cdf_cmd->add_flag("--magnitude", cd.binning.magnitude);
    cdf_cmd->callback([&] {
        if (cd.direction != "above" && cd.direction != "below")
            throw data_error("cdf: --direction must be above or below");
        const auto values = load_derivative_values(cd.input);
        const double width = resolve_bin_width(cd.binning, cd.input);
        const Histogram h = build_histogram(values, cd.binning, width);
        const auto rows = cumulative(h, cd.direction == "above" ? CumulativeDirection::above
                                                                : CumulativeDirection::below);
        write_table(cd.output, "threshold,cumulative", rows);
        write_sidecar(cd.output, geometry_meta(h, cd.binning.magnitude));
        rc = 0;
    });

    // ---- fit
    auto* fit_cmd = app.add_subcommand("fit", "least-squares fits");
    fit_cmd->require_subcommand(1);
    struct {
        std::string input, range, output;
    } fs_;
    auto* slope_cmd = fit_cmd->add_subcommand("slope", "log-log power-exponent fit");
    slope_cmd->add_option("--input", fs_.input, "two-column (x, f) table")->required();
    slope_cmd->add_option("--range", fs_.range, "x fit range lo:hi")->required();
    slope_cmd->add_option("--output", fs_.output, "JSON result path");
    slope_cmd->callback([&] {
        const auto points = read_two_column(fs_.input);
        const auto [lo, hi] = parse_range(fs_.range, "--range");
        emit_fit(fit_loglog_slope(points, {lo, hi}), fs_.output);
        rc = 0;
    });
    struct {
        std::string input, output;
    } fb;
    auto* bmax_cmd = fit_cmd->add_subcommand("bmax-scaling", "fit b_max = C/tau^alpha");
    bmax_cmd->add_option("--input", fb.input, "two-column (tau, b_max) table")->required();
    bmax_cmd->add_option("--output", fb.output, "JSON result path");
    bmax_cmd->callback([&] {
        const auto points = read_two_column(fb.input);
        emit_fit(fit_bmax_scaling(points), fb.output);
        rc = 0;
    });

    // ---- simulate
    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "evaluate a partition form over a Y grid");
    sim_cmd->add_option("--form", sim.form, "finite-sum|uniform|geometric|bose|eq28|eq31")
        ->required();
    sim_cmd->add_option("--y-grid", sim.y_grid, "lo:hi:steps[:log|lin]")->required();
    sim_cmd->add_option("--output", sim.output)->required();
    sim_cmd->add_option("--x-power", sim.x_power, "X = Y^p mapping for the partition forms");
    sim_cmd->add_option("--J", sim.J, "set size (finite-sum/geometric)");
    sim_cmd->add_option("--b-min", sim.b_min);
    sim_cmd->add_option("--b-max", sim.b_max);
    sim_cmd->add_option("--B", sim.B, "linear multiplier step (geometric/bose)");
    sim_cmd->add_option("--seed", sim.seed);
    sim_cmd->add_flag("--infinite", sim.infinite, "geometric: infinite series");
    sim_cmd->add_option("--n", sim.params.n);
    sim_cmd->add_option("--y", sim.params.y);
    sim_cmd->add_option("--beta", sim.params.beta);
    sim_cmd->add_option("--model-b-min", sim.params.b_min);
    sim_cmd->add_option("--model-b-max", sim.params.b_max);
    sim_cmd->add_option("--C", sim.params.C);
    sim_cmd->add_option("--alpha", sim.params.alpha);
    sim_cmd->add_option("--tau", sim.params.tau);
    sim_cmd->callback([&] { rc = cmd_simulate(sim); });

    // ---- sample
    SampleOptions smp;
    auto* sample_cmd = app.add_subcommand("sample", "draw from a model density");
    sample_cmd->add_option("--form", smp.form, "eq28|eq31");
    sample_cmd->add_option("--support", smp.support, "lo:hi")->required();
    sample_cmd->add_option("--count", smp.count)->required();
    sample_cmd->add_option("--seed", smp.seed);
    sample_cmd->add_option("--grid-cells", smp.grid_cells);
    sample_cmd->add_option("--output", smp.output)->required();
    sample_cmd->add_option("--n", smp.params.n);
    sample_cmd->add_option("--y", smp.params.y);
    sample_cmd->add_option("--beta", smp.params.beta);
    sample_cmd->add_option("--model-b-min", smp.params.b_min);
    sample_cmd->add_option("--model-b-max", smp.params.b_max);
    sample_cmd->add_option("--C", smp.params.C);
    sample_cmd->add_option("--alpha", smp.params.alpha);
    sample_cmd->add_option("--tau", smp.params.tau);
    sample_cmd->callback([&] { rc = cmd_sample(smp); });

    // ---- collapse
    struct {
        std::string method = "unity", density, params, region, output;
    } cl;
    auto* collapse_cmd = app.add_subcommand("collapse", "collapse a density onto a constant");
    collapse_cmd->add_option("--method", cl.method, "unity|ratio");
    collapse_cmd->add_option("--density", cl.density, "density table (from hist --density)")
        ->required();
    collapse_cmd->add_option("--params", cl.params, "model params JSON file")->required();
    collapse_cmd->add_option("--region", cl.region, "flatness region lo:hi");
    collapse_cmd->add_option("--output", cl.output)->required();
    collapse_cmd->callback(
        [&] { rc = cmd_collapse(cl.method, cl.density, cl.params, cl.region, cl.output); });

    // ---- generate
    SyntheticConfig gen;
    std::string gen_output, gen_support;
    auto* gen_cmd = app.add_subcommand("generate", "write a synthetic bar file");
    gen_cmd->add_option("--count", gen.count)->required();
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--output", gen_output)->required();
    gen_cmd->add_option("--support", gen_support, "return draw support lo:hi");
    gen_cmd->add_option("--base-price", gen.base_price);
    gen_cmd->add_option("--start-ts", gen.start_ts);
    gen_cmd->add_option("--vol-min", gen.vol_min);
    gen_cmd->add_option("--vol-max", gen.vol_max);
    gen_cmd->add_option("--instrument", gen.instrument);
    gen_cmd->add_option("--price-step", gen.price_step);
    gen_cmd->add_option("--n", gen.params.n);
    gen_cmd->add_option("--beta", gen.params.beta);
    gen_cmd->add_option("--C", gen.params.C);
    gen_cmd->add_option("--alpha", gen.params.alpha);
    gen_cmd->add_option("--tau", gen.params.tau);
    gen_cmd->callback([&] {
        if (!gen_support.empty()) {
            const auto [lo, hi] = parse_range(gen_support, "--support");
            gen.support_lo = lo;
            gen.support_hi = hi;
        }
        rc = cmd_generate(gen, gen_output);
    });

    // ---- pipeline
    struct {
        std::string config;
        std::string output_dir;
        std::vector<std::string> inputs;
        std::string kind;
        double bin_width = 0;
    } pl;
    auto* pipe_cmd = app.add_subcommand("pipeline", "run ingest->derive->hist(->fit/collapse)");
    pipe_cmd->add_option("--config", pl.config, "RunConfig JSON (or a previous manifest)")
        ->required();
    pipe_cmd->add_option("--output-dir", pl.output_dir, "overrides config output_dir");
    pipe_cmd->add_option("--input", pl.inputs, "overrides config inputs[]");
    pipe_cmd->add_option("--kind", pl.kind, "overrides config derivative.kind");
    pipe_cmd->add_option("--bin-width", pl.bin_width, "overrides config hist.bin_width");
    pipe_cmd->callback([&] {
        json cfg = read_json_file(pl.config);
        if (cfg.contains("config")) cfg = cfg.at("config"); // accept a manifest
        // flags win over the config file
        if (!pl.output_dir.empty()) cfg["output_dir"] = pl.output_dir;
        if (!pl.inputs.empty()) cfg["inputs"] = pl.inputs;
        if (!pl.kind.empty()) cfg["derivative"]["kind"] = pl.kind;
        if (pl.bin_width > 0) cfg["hist"]["bin_width"] = pl.bin_width;
        rc = cmd_pipeline(config_from_json(cfg));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const computation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
