#include "fft.hpp"

#include <cmath>
#include <stdexcept>

namespace medpipe::detail {

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("FFT size must be a power of two");
    }
    bitrev_.resize(n);
    bitrev_[0] = 0;
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 1; i < n; ++i) {
        bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) << (log2n - 1));
    }
    // one twiddle per k in [0, n/2): w_k = exp(-2*pi*i*k/n)
    cos_.resize(n / 2);
    sin_.resize(n / 2);
    const double step = -2.0 * M_PI / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        cos_[k] = std::cos(step * static_cast<double>(k));
        sin_[k] = std::sin(step * static_cast<double>(k));
    }
}

void FftPlan::transform(double* re, double* im, bool invert) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n_ / len;
        for (std::size_t base = 0; base < n_; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = cos_[k * stride];
                const double wi = invert ? -sin_[k * stride] : sin_[k * stride];
                const std::size_t a = base + k;
                const std::size_t b = a + half;
                const double tr = re[b] * wr - im[b] * wi;
                const double ti = re[b] * wi + im[b] * wr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
        }
    }
}

void FftPlan::forward(double* re, double* im) const { transform(re, im, false); }

void FftPlan::inverse(double* re, double* im) const {
    transform(re, im, true);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        re[i] *= inv;
        im[i] *= inv;
    }
}

}  // namespace medpipe::detail
