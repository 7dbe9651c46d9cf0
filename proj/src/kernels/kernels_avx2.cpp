#include "finmb/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 variants of the scalar reference kernels. Plain vsubpd/vdivpd/
// vroundpd/vandpd only — no FMA — so results are bit-identical to the
// scalar backend (asserted by the equivalence tests).

namespace finmb::kernels::avx2 {

void diff(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(vb, va));
    }
    for (; i < n; ++i) out[i] = b[i] - a[i];
}

void rel_diff(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(vb, va), va));
    }
    for (; i < n; ++i) out[i] = (b[i] - a[i]) / a[i];
}

void ratio(const double* num, const double* den, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vn = _mm256_loadu_pd(num + i);
        __m256d vd = _mm256_loadu_pd(den + i);
        _mm256_storeu_pd(out + i, _mm256_div_pd(vn, vd));
    }
    for (; i < n; ++i) out[i] = num[i] / den[i];
}

void abs_values(const double* v, double* out, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_loadu_pd(v + i), mask));
    }
    for (; i < n; ++i) out[i] = std::fabs(v[i]);
}

std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n) {
    constexpr double kLimit = 4611686018427387904.0; // 2^62
    const __m256d vorigin = _mm256_set1_pd(origin);
    const __m256d vwidth = _mm256_set1_pd(width);
    const __m256d vlimit = _mm256_set1_pd(kLimit);
    const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t i = 0;
    alignas(32) double lane[4];
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vorigin), vwidth);
        d = _mm256_round_pd(d, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
        // !(|d| < 2^62) catches NaN (unordered compare false) and overflow.
        __m256d ok = _mm256_cmp_pd(_mm256_and_pd(d, sign_mask), vlimit, _CMP_LT_OQ);
        if (_mm256_movemask_pd(ok) != 0xf) {
            _mm256_store_pd(lane, d);
            for (int k = 0; k < 4; ++k)
                if (!(std::fabs(lane[k]) < kLimit)) return static_cast<std::ptrdiff_t>(i + k);
        }
        _mm256_store_pd(lane, d);
        out[i + 0] = static_cast<std::int64_t>(lane[0]);
        out[i + 1] = static_cast<std::int64_t>(lane[1]);
        out[i + 2] = static_cast<std::int64_t>(lane[2]);
        out[i + 3] = static_cast<std::int64_t>(lane[3]);
    }
    for (; i < n; ++i) {
        const double d = std::floor((v[i] - origin) / width);
        if (!(std::fabs(d) < kLimit)) return static_cast<std::ptrdiff_t>(i);
        out[i] = static_cast<std::int64_t>(d);
    }
    return -1;
}

} // namespace finmb::kernels::avx2
