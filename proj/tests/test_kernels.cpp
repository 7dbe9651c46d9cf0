#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "finmb/errors.hpp"
#include "finmb/kernels.hpp"
#include "finmb/rng.hpp"

using namespace finmb;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, bool with_zeros) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (uniform01(rng) - 0.5) * 2000.0;
        if (with_zeros && rng() % 7 == 0) v[i] = 0.0;
    }
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("scalar kernels: reference semantics") {
    const std::vector<double> a{1.0, 2.0, 0.0, -3.5};
    const std::vector<double> b{4.0, 1.0, 2.0, -3.5};
    std::vector<double> out(4);
    kernels::scalar::diff(a.data(), b.data(), out.data(), 4);
    CHECK(out == std::vector<double>{3.0, -1.0, 2.0, 0.0});
    kernels::scalar::rel_diff(a.data(), b.data(), out.data(), 4);
    CHECK(out[0] == 3.0);
    CHECK(out[1] == -0.5);
    CHECK(std::isinf(out[2]));
    CHECK(out[3] == 0.0);
    kernels::scalar::abs_values(b.data(), out.data(), 4);
    CHECK(out == std::vector<double>{4.0, 1.0, 2.0, 3.5});
}

TEST_CASE("scalar bin_index matches the floor definition") {
    const std::vector<double> v{0.0, 0.00004, 0.00012, -0.00006};
    std::vector<std::int64_t> idx(v.size());
    REQUIRE(kernels::scalar::bin_index(v.data(), -0.00005, 0.0001, idx.data(), v.size()) == -1);
    CHECK(idx == std::vector<std::int64_t>{0, 0, 1, -1});
}

TEST_CASE("bin_index reports non-finite and overflowing inputs") {
    std::vector<double> v{1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0};
    std::vector<std::int64_t> idx(v.size());
    CHECK(kernels::scalar::bin_index(v.data(), 0.0, 1.0, idx.data(), v.size()) == 2);
    v[2] = std::numeric_limits<double>::infinity();
    CHECK(kernels::scalar::bin_index(v.data(), 0.0, 1.0, idx.data(), v.size()) == 2);
    v[2] = 1e300; // index overflows int64 at width 1e-10
    CHECK(kernels::scalar::bin_index(v.data(), 0.0, 1e-10, idx.data(), v.size()) == 2);
    v[2] = 3.0;
    CHECK(kernels::scalar::bin_index(v.data(), 0.0, 1.0, idx.data(), v.size()) == -1);
    CHECK(idx == std::vector<std::int64_t>{1, 2, 3, 4});
}

#if defined(FINMB_HAVE_AVX2)
TEST_CASE("avx2 kernels are bit-identical to scalar") {
    if (!kernels::avx2_supported()) return;
    // sizes around the 4-lane boundary plus a large block
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 4096u, 10001u}) {
        const auto a = random_values(n, 100 + n, true);
        const auto b = random_values(n, 200 + n, true);
        std::vector<double> s(n), x(n);

        kernels::scalar::diff(a.data(), b.data(), s.data(), n);
        kernels::avx2::diff(a.data(), b.data(), x.data(), n);
        CHECK(bitwise_equal(s, x));

        kernels::scalar::rel_diff(a.data(), b.data(), s.data(), n);
        kernels::avx2::rel_diff(a.data(), b.data(), x.data(), n);
        CHECK(bitwise_equal(s, x));

        kernels::scalar::ratio(a.data(), b.data(), s.data(), n);
        kernels::avx2::ratio(a.data(), b.data(), x.data(), n);
        CHECK(bitwise_equal(s, x));

        kernels::scalar::abs_values(a.data(), s.data(), n);
        kernels::avx2::abs_values(a.data(), x.data(), n);
        CHECK(bitwise_equal(s, x));

        std::vector<std::int64_t> si(n), xi(n);
        const auto rs = kernels::scalar::bin_index(a.data(), -0.05, 0.1, si.data(), n);
        const auto rx = kernels::avx2::bin_index(a.data(), -0.05, 0.1, xi.data(), n);
        CHECK(rs == rx);
        CHECK(si == xi);
    }
}

TEST_CASE("avx2 bin_index reports the same failure position as scalar") {
    if (!kernels::avx2_supported()) return;
    auto v = random_values(1000, 13, false);
    v[517] = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::int64_t> idx(v.size());
    CHECK(kernels::scalar::bin_index(v.data(), 0.0, 0.25, idx.data(), v.size()) == 517);
    CHECK(kernels::avx2::bin_index(v.data(), 0.0, 0.25, idx.data(), v.size()) == 517);
}
#endif

TEST_CASE("backend selection") {
    const auto original = kernels::active_backend();
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    if (kernels::avx2_supported()) {
        kernels::set_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
    } else {
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::avx2), data_error);
    }
    kernels::set_backend(original);
}
