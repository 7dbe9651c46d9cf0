#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the derivative/histogram pipeline, with a
// scalar reference implementation and an AVX2 variant selected at runtime.
//
// Every kernel is strictly element-wise and built from IEEE sub/div/floor/
// abs only (no FMA, no reassociation), so the two backends produce
// bit-identical output; the unit tests assert exact equality.

namespace finmb::kernels {

enum class Backend { scalar, avx2 };

bool avx2_supported();

// Active backend. Defaults to AVX2 when the CPU supports it, overridable
// with FINMB_BACKEND=scalar|avx2 in the environment.
Backend active_backend();

// Force a backend (throws finmb::data_error if unsupported on this CPU).
void set_backend(Backend b);

// out[i] = b[i] - a[i]
void diff(const double* a, const double* b, double* out, std::size_t n);

// out[i] = (b[i] - a[i]) / a[i]
void rel_diff(const double* a, const double* b, double* out, std::size_t n);

// out[i] = num[i] / den[i]
void ratio(const double* num, const double* den, double* out, std::size_t n);

// out[i] = |v[i]|
void abs_values(const double* v, double* out, std::size_t n);

// out[i] = floor((v[i] - origin) / width) as a signed 64-bit bin index.
// Returns -1 on success, else the position of the first value whose index
// is not representable (non-finite input, or |index| >= 2^62).
std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n);

// Per-backend entry points used by the equivalence tests.
namespace scalar {
void diff(const double* a, const double* b, double* out, std::size_t n);
void rel_diff(const double* a, const double* b, double* out, std::size_t n);
void ratio(const double* num, const double* den, double* out, std::size_t n);
void abs_values(const double* v, double* out, std::size_t n);
std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n);
} // namespace scalar

#if defined(FINMB_HAVE_AVX2)
namespace avx2 {
void diff(const double* a, const double* b, double* out, std::size_t n);
void rel_diff(const double* a, const double* b, double* out, std::size_t n);
void ratio(const double* num, const double* den, double* out, std::size_t n);
void abs_values(const double* v, double* out, std::size_t n);
std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n);
} // namespace avx2
#endif

} // namespace finmb::kernels
