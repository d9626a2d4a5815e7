#pragma once

#include <cstddef>
#include <vector>

namespace medpipe::detail {

// Iterative radix-2 FFT over split real/imaginary arrays. Sizes are powers of
// two only, which is all the spectral gate needs. Twiddles and the bit
// reversal permutation are precomputed per plan; transforms are deterministic.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n);

    void forward(double* re, double* im) const;
    // Includes the 1/n scale, so inverse(forward(x)) == x up to rounding.
    void inverse(double* re, double* im) const;

    std::size_t size() const { return n_; }

  private:
    void transform(double* re, double* im, bool invert) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

}  // namespace medpipe::detail
