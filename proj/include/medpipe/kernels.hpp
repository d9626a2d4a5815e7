#pragma once

#include <cstddef>
#include <cstdint>

// Low-level array kernels used by the DSP layer. Every kernel has a scalar
// reference implementation; on x86-64 an AVX2 variant is selected at runtime
// when the CPU supports it. Elementwise kernels (clamp, scale, multiply, axpy,
// apply_gain, downmix_stereo) produce bit-identical results on every backend:
// the vector code performs the same multiply/add per element with no fused
// operations. Reductions (sum_squares, sum_squared_diff, dot) accumulate in a
// different order under AVX2, so callers must treat their results as equal only
// up to the usual floating-point reassociation error.

namespace medpipe::kernels {

enum class Backend { scalar, avx2 };

// Backend chosen for this process (detected once, on first use).
Backend active_backend();
const char* backend_name(Backend b);

// Test hook: pin the backend explicitly. Requesting avx2 on a machine without
// it is ignored. reset_backend() returns to auto-detection.
void force_backend(Backend b);
void reset_backend();
bool avx2_available();

// Reductions.
double sum_squares(const double* x, std::size_t n);
double sum_squared_diff(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double peak_abs(const double* x, std::size_t n);
std::size_t count_abs_ge(const double* x, std::size_t n, double threshold);

// Elementwise. Output may alias the input.
void clamp(const double* x, double* out, std::size_t n, double limit);
void scale(const double* x, double* out, std::size_t n, double k);
void multiply(const double* a, const double* b, double* out, std::size_t n);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// mag[i] = sqrt(re[i]^2 + im[i]^2)
void complex_magnitude(const double* re, const double* im, double* mag, std::size_t n);
// re[i] *= gain[i]; im[i] *= gain[i]
void apply_gain(double* re, double* im, const double* gain, std::size_t n);
// mono[i] = (interleaved[2i] + interleaved[2i+1]) * 0.5
void downmix_stereo(const double* interleaved, double* mono, std::size_t frames);

}  // namespace medpipe::kernels
