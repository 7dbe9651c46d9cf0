#pragma once

#include <cstdint>
#include <random>

namespace finmb {

// All randomness in the library flows through mt19937_64 with an explicit
// seed. The generator's output sequence is fixed by the C++ standard, so
// seeded results are bit-identical across compilers and platforms.
// std::uniform_real_distribution is implementation-defined and must not be
// used anywhere results are serialized.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one generator word.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] by rejection-free modulo of a 64-bit word.
// The modulo bias for the ranges used here (spans << 2^64) is far below
// anything observable; determinism matters more than the last 1e-15 of
// uniformity.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<std::int64_t>(rng() % span);
}

} // namespace finmb
