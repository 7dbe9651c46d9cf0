#include <doctest.h>

#include <cmath>

#include "finmb/bars.hpp"
#include "finmb/derive.hpp"
#include "finmb/errors.hpp"
#include "finmb/rng.hpp"

using namespace finmb;

namespace {

PriceSeries make_series(const std::vector<double>& closes, const std::vector<double>& volumes,
                        std::int64_t tau = 60) {
    REQUIRE(closes.size() == volumes.size());
    std::vector<OhlcvBar> bars;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        const double c = closes[i];
        bars.push_back({static_cast<std::int64_t>(i) * tau, c, c, c, c, volumes[i]});
    }
    return build_series(std::move(bars), "T", tau, 1e-5, GapPolicy::lenient);
}

PriceSeries random_series(std::size_t n, std::uint64_t seed, bool with_gaps = false,
                          bool with_zero_volumes = false) {
    Rng rng(seed);
    std::vector<OhlcvBar> bars;
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 0.5 + uniform01(rng) * 99.5;
        double v = std::floor(uniform01(rng) * 50);
        if (!with_zero_volumes && v == 0) v = 1;
        bars.push_back({t, c, c, c, c, v});
        t += 60;
        if (with_gaps && rng() % 11 == 0) t += 60 * static_cast<std::int64_t>(1 + rng() % 3);
    }
    return build_series(std::move(bars), "T", 60, 1e-5, GapPolicy::lenient);
}

} // namespace

TEST_CASE("plain_returns on closes [1,2,4] and constants") {
    auto d = plain_returns(make_series({1, 2, 4}, {1, 1, 1}));
    CHECK(d.value == std::vector<double>{1, 2});
    CHECK(d.ts == std::vector<std::int64_t>{60, 120});
    auto c = plain_returns(make_series({3, 3, 3}, {1, 1, 1}));
    CHECK(c.value == std::vector<double>{0, 0});
}

TEST_CASE("plain_returns matches element-wise recomputation on 1e4 random closes") {
    const PriceSeries s = random_series(10000, 5);
    const auto d = plain_returns(s);
    REQUIRE(d.size() == s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        CHECK(d.value[i] == s.close[i + 1] - s.close[i]);
}

TEST_CASE("relative_returns basics") {
    auto r = relative_returns(make_series({100, 101}, {1, 1}));
    REQUIRE(r.size() == 1);
    CHECK(r.value[0] == doctest::Approx(0.01).epsilon(1e-15));
    auto c = relative_returns(make_series({5, 5, 5}, {1, 1, 1}));
    CHECK(c.value == std::vector<double>{0, 0});
    auto z = relative_returns(make_series({0, 5}, {1, 1}));
    CHECK(z.size() == 0);
    CHECK(z.skipped.zero_denominator == 1);
}

TEST_CASE("volume_changes examples and brute force") {
    auto w = volume_changes(make_series({1, 1, 1}, {10, 4, 9}));
    CHECK(w.value == std::vector<double>{-6, 5});
    const PriceSeries s = random_series(5000, 17);
    const auto d = volume_changes(s);
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        CHECK(d.value[i] == s.volume[i + 1] - s.volume[i]);
}

TEST_CASE("relative_volume_changes examples") {
    auto a = relative_volume_changes(make_series({1, 1}, {10, 15}));
    CHECK(a.value == std::vector<double>{0.5});
    auto b = relative_volume_changes(make_series({1, 1}, {0, 7}));
    CHECK(b.size() == 0);
    CHECK(b.skipped.zero_denominator == 1);
    auto c = relative_volume_changes(make_series({1, 1}, {8, 8}));
    CHECK(c.value == std::vector<double>{0});
}

TEST_CASE("simultaneous_ratios: example, omega=0 skip, brute force") {
    auto s1 = simultaneous_ratios(make_series({100, 101}, {10, 15}));
    REQUIRE(s1.size() == 1);
    CHECK(s1.value[0] == 0.02);

    auto s2 = simultaneous_ratios(make_series({100, 101, 102}, {10, 10, 15}));
    CHECK(s2.size() == 1); // first pair skipped: omega = 0
    CHECK(s2.skipped.zero_denominator == 1);

    const PriceSeries s = random_series(5000, 23, false, true);
    const auto d = simultaneous_ratios(s);
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s.close[i] == 0.0 || s.volume[i] == 0.0) continue;
        const double r = (s.close[i + 1] - s.close[i]) / s.close[i];
        const double w = (s.volume[i + 1] - s.volume[i]) / s.volume[i];
        if (w == 0.0) continue;
        REQUIRE(k < d.size());
        CHECK(d.value[k] == r / w);
        ++k;
    }
    CHECK(k == d.size());
}

TEST_CASE("general_ratios: reduction, powers, zero-base skip") {
    const PriceSeries s = random_series(2000, 31, false, true);
    const auto gen = general_ratios(s, 1, 1);
    const auto sim = simultaneous_ratios(s);
    REQUIRE(gen.size() == sim.size());
    for (std::size_t i = 0; i < gen.size(); ++i) CHECK(gen.value[i] == sim.value[i]);

    auto g2 = general_ratios(make_series({100, 101}, {10, 15}), 2, 1);
    REQUIRE(g2.size() == 1);
    CHECK(g2.value[0] == doctest::Approx(0.0002).epsilon(1e-12));

    // R = 0 with negative theta is skipped
    auto g3 = general_ratios(make_series({100, 100}, {10, 15}), -1, 1);
    CHECK(g3.size() == 0);
    CHECK(g3.skipped.zero_denominator == 1);

    CHECK_THROWS_AS(general_ratios(s, 0, 1), data_error);
    CHECK_THROWS_AS(general_ratios(s, 1, 0), data_error);
}

TEST_CASE("general_ratios matches brute-force per-element theta=3 phi=2") {
    const PriceSeries s = random_series(4000, 37, false, true);
    const auto d = general_ratios(s, 3, 2);
    // volatile exponents force the same runtime libm pow the library uses
    // (a literal would let the compiler expand the power inline)
    volatile double vth = 3.0, vph = 2.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s.close[i] == 0.0 || s.volume[i] == 0.0) continue;
        const double r = (s.close[i + 1] - s.close[i]) / s.close[i];
        const double w = (s.volume[i + 1] - s.volume[i]) / s.volume[i];
        if (w == 0.0) continue;
        REQUIRE(k < d.size());
        CHECK(d.value[k] == std::pow(r, vth) / std::pow(w, vph));
        ++k;
    }
    CHECK(k == d.size());
}

TEST_CASE("gap pairs are skipped and tallied; |points| + skipped = N - 1") {
    const PriceSeries s = random_series(3000, 41, true, true);
    const std::size_t pairs = s.size() - 1;
    for (const auto& kind : {DerivativeKind{DerivativeTag::plain_return},
                             DerivativeKind{DerivativeTag::relative_return},
                             DerivativeKind{DerivativeTag::volume_change},
                             DerivativeKind{DerivativeTag::relative_volume_change},
                             DerivativeKind{DerivativeTag::simultaneous_ratio},
                             DerivativeKind{DerivativeTag::general_ratio, 2, 1}}) {
        const auto d = derive(s, kind);
        CHECK(d.size() + d.skipped.total() == pairs);
        CHECK(d.skipped.gap == s.gap_count);
    }
}

TEST_CASE("sign symmetry: mirroring closes about a constant negates D exactly") {
    // pip-quantized closes (multiples of 2^-10) make 2c - close exact,
    // as with real price-step data
    PriceSeries s = random_series(2000, 43);
    for (double& v : s.close) v = std::floor(v * 1024.0) / 1024.0;
    PriceSeries mirrored = s;
    const double c = 64.0;
    for (double& v : mirrored.close) v = 2 * c - v;
    const auto d = plain_returns(s);
    const auto dm = plain_returns(mirrored);
    REQUIRE(d.size() == dm.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(dm.value[i] == -d.value[i]);
}

TEST_CASE("D and R vanish together") {
    PriceSeries s = random_series(2000, 47);
    for (std::size_t i = 100; i < s.size(); i += 100) s.close[i] = s.close[i - 1];
    const auto d = plain_returns(s);
    const auto r = relative_returns(s);
    REQUIRE(d.size() == r.size()); // no zero closes in this generator
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK((d.value[i] == 0.0) == (r.value[i] == 0.0));
        if (d.value[i] == 0.0) ++zeros;
    }
    CHECK(zeros >= 19);
}

TEST_CASE("horizontal trend: R tracks D/c within the 2*eps bound") {
    // closes within +-eps*c of a constant c
    const double c = 50.0;
    const double eps = 1e-3;
    Rng rng(53);
    std::vector<double> closes(500);
    for (double& v : closes) v = c * (1.0 + eps * (2 * uniform01(rng) - 1));
    std::vector<double> volumes(closes.size(), 1.0);
    const PriceSeries s = make_series(closes, volumes);
    const auto d = plain_returns(s);
    const auto r = relative_returns(s);
    double max_r = 0;
    for (double v : r.value) max_r = std::max(max_r, std::fabs(v));
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(std::fabs(r.value[i] - d.value[i] / c) <= 2 * eps * max_r + 1e-18);
}

TEST_CASE("series shorter than 2 bars is rejected") {
    CHECK_THROWS_AS(plain_returns(make_series({1}, {1})), data_error);
}

TEST_CASE("DerivativeKind::parse") {
    CHECK(DerivativeKind::parse("D").tag == DerivativeTag::plain_return);
    CHECK(DerivativeKind::parse("omega").tag == DerivativeTag::relative_volume_change);
    CHECK(DerivativeKind::parse("general", 2, 3).theta == 2);
    CHECK_THROWS_AS(DerivativeKind::parse("general"), data_error);
    CHECK_THROWS_AS(DerivativeKind::parse("x"), data_error);
}
