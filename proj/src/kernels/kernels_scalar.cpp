// Scalar reference kernels. These define the semantics; the SIMD variants must
// match them (bit-for-bit for the elementwise kernels). Keep the loops dumb.

#include <cmath>
#include <cstddef>

namespace medpipe::kernels::detail {

double scalar_sum_squares(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double scalar_sum_squared_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double scalar_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double scalar_peak_abs(const double* x, std::size_t n) {
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > peak) peak = v;
    }
    return peak;
}

std::size_t scalar_count_abs_ge(const double* x, std::size_t n, double threshold) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(x[i]) >= threshold) ++count;
    }
    return count;
}

void scalar_clamp(const double* x, double* out, std::size_t n, double limit) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i];
        if (v > limit) v = limit;
        if (v < -limit) v = -limit;
        out[i] = v;
    }
}

void scalar_scale(const double* x, double* out, std::size_t n, double k) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * k;
}

void scalar_multiply(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scalar_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scalar_complex_magnitude(const double* re, const double* im, double* mag, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
}

void scalar_apply_gain(double* re, double* im, const double* gain, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = re[i] * gain[i];
        im[i] = im[i] * gain[i];
    }
}

void scalar_downmix_stereo(const double* interleaved, double* mono, std::size_t frames) {
    for (std::size_t i = 0; i < frames; ++i) {
        mono[i] = (interleaved[2 * i] + interleaved[2 * i + 1]) * 0.5;
    }
}

}  // namespace medpipe::kernels::detail
