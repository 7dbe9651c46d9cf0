#include "finmb/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "finmb/errors.hpp"

namespace finmb::kernels {

bool avx2_supported() {
#if defined(FINMB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

Backend pick_default() {
    if (const char* env = std::getenv("FINMB_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_supported())
                throw data_error("FINMB_BACKEND=avx2 but CPU lacks AVX2");
            return Backend::avx2;
        }
        throw data_error(std::string("unknown FINMB_BACKEND value: ") + env);
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_state() {
    static std::atomic<Backend> state{pick_default()};
    return state;
}

} // namespace

Backend active_backend() { return backend_state().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw data_error("AVX2 backend requested but CPU lacks AVX2");
    backend_state().store(b, std::memory_order_relaxed);
}

#if defined(FINMB_HAVE_AVX2)
#define FINMB_DISPATCH(fn, ...) \
    return active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define FINMB_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void diff(const double* a, const double* b, double* out, std::size_t n) {
    FINMB_DISPATCH(diff, a, b, out, n);
}

void rel_diff(const double* a, const double* b, double* out, std::size_t n) {
    FINMB_DISPATCH(rel_diff, a, b, out, n);
}

void ratio(const double* num, const double* den, double* out, std::size_t n) {
    FINMB_DISPATCH(ratio, num, den, out, n);
}

void abs_values(const double* v, double* out, std::size_t n) {
    FINMB_DISPATCH(abs_values, v, out, n);
}

std::ptrdiff_t bin_index(const double* v, double origin, double width,
                         std::int64_t* out, std::size_t n) {
    FINMB_DISPATCH(bin_index, v, origin, width, out, n);
}

#undef FINMB_DISPATCH

} // namespace finmb::kernels
