#include "medpipe/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace medpipe::kernels {

namespace detail {

double scalar_sum_squares(const double*, std::size_t);
double scalar_sum_squared_diff(const double*, const double*, std::size_t);
double scalar_dot(const double*, const double*, std::size_t);
double scalar_peak_abs(const double*, std::size_t);
std::size_t scalar_count_abs_ge(const double*, std::size_t, double);
void scalar_clamp(const double*, double*, std::size_t, double);
void scalar_scale(const double*, double*, std::size_t, double);
void scalar_multiply(const double*, const double*, double*, std::size_t);
void scalar_axpy(double, const double*, double*, std::size_t);
void scalar_complex_magnitude(const double*, const double*, double*, std::size_t);
void scalar_apply_gain(double*, double*, const double*, std::size_t);
void scalar_downmix_stereo(const double*, double*, std::size_t);

#ifdef MEDPIPE_HAVE_AVX2
double avx2_sum_squares(const double*, std::size_t);
double avx2_sum_squared_diff(const double*, const double*, std::size_t);
double avx2_dot(const double*, const double*, std::size_t);
double avx2_peak_abs(const double*, std::size_t);
std::size_t avx2_count_abs_ge(const double*, std::size_t, double);
void avx2_clamp(const double*, double*, std::size_t, double);
void avx2_scale(const double*, double*, std::size_t, double);
void avx2_multiply(const double*, const double*, double*, std::size_t);
void avx2_axpy(double, const double*, double*, std::size_t);
void avx2_complex_magnitude(const double*, const double*, double*, std::size_t);
void avx2_apply_gain(double*, double*, const double*, std::size_t);
void avx2_downmix_stereo(const double*, double*, std::size_t);
#endif

}  // namespace detail

namespace {

bool hardware_has_avx2() {
#ifdef MEDPIPE_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() {
    if (const char* off = std::getenv("MEDPIPE_NO_SIMD"); off != nullptr && *off != '\0') {
        return Backend::scalar;
    }
    return hardware_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

bool avx2_available() { return hardware_has_avx2(); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available()) return;
    g_backend.store(b, std::memory_order_relaxed);
}

void reset_backend() { g_backend.store(detect(), std::memory_order_relaxed); }

#ifdef MEDPIPE_HAVE_AVX2
#define MEDPIPE_DISPATCH(name, ...)                               \
    (active_backend() == Backend::avx2 ? detail::avx2_##name(__VA_ARGS__) \
                                       : detail::scalar_##name(__VA_ARGS__))
#else
#define MEDPIPE_DISPATCH(name, ...) detail::scalar_##name(__VA_ARGS__)
#endif

double sum_squares(const double* x, std::size_t n) { return MEDPIPE_DISPATCH(sum_squares, x, n); }

double sum_squared_diff(const double* a, const double* b, std::size_t n) {
    return MEDPIPE_DISPATCH(sum_squared_diff, a, b, n);
}

double dot(const double* a, const double* b, std::size_t n) { return MEDPIPE_DISPATCH(dot, a, b, n); }

double peak_abs(const double* x, std::size_t n) { return MEDPIPE_DISPATCH(peak_abs, x, n); }

std::size_t count_abs_ge(const double* x, std::size_t n, double threshold) {
    return MEDPIPE_DISPATCH(count_abs_ge, x, n, threshold);
}

void clamp(const double* x, double* out, std::size_t n, double limit) {
    MEDPIPE_DISPATCH(clamp, x, out, n, limit);
}

void scale(const double* x, double* out, std::size_t n, double k) {
    MEDPIPE_DISPATCH(scale, x, out, n, k);
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
    MEDPIPE_DISPATCH(multiply, a, b, out, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    MEDPIPE_DISPATCH(axpy, a, x, y, n);
}

void complex_magnitude(const double* re, const double* im, double* mag, std::size_t n) {
    MEDPIPE_DISPATCH(complex_magnitude, re, im, mag, n);
}

void apply_gain(double* re, double* im, const double* gain, std::size_t n) {
    MEDPIPE_DISPATCH(apply_gain, re, im, gain, n);
}

void downmix_stereo(const double* interleaved, double* mono, std::size_t frames) {
    MEDPIPE_DISPATCH(downmix_stereo, interleaved, mono, frames);
}

#undef MEDPIPE_DISPATCH

}  // namespace medpipe::kernels
