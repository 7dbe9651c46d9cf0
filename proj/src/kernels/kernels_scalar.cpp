#include "finmb/kernels.hpp"

#include <cmath>

// Reference implementations. The AVX2 variants mirror these operation for
// operation; any change here must be reflected there to keep the backends
// bit-identical.

namespace finmb::kernels::scalar {

void diff(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = b[i] - a[i];
}

void rel_diff(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (b[i] - a[i]) / a[i];
}

void ratio(const double* num, const double* den, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / den[i];
}

void abs_values(const double* v, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(v[i]);
}

std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n) {
    // Indices beyond +-2^62 (or non-finite inputs, whose index is NaN/inf)
    // are reported instead of cast: double -> int64 conversion out of range
    // is undefined behavior.
    constexpr double kLimit = 4611686018427387904.0; // 2^62
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::floor((v[i] - origin) / width);
        if (!(std::fabs(d) < kLimit)) return static_cast<std::ptrdiff_t>(i);
        out[i] = static_cast<std::int64_t>(d);
    }
    return -1;
}

} // namespace finmb::kernels::scalar
