#include "medpipe/augment.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"

namespace medpipe {

namespace {

// std::normal_distribution is free to differ between standard libraries, which
// would break the reproducibility contract, so the Gaussian shaping is spelled
// out here: 53-bit uniforms from mt19937_64, paired through Box-Muller.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - unit();  // (0, 1]; keeps log() finite
        const double u2 = unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

AudioBuffer add_white_noise(const AudioBuffer& buffer, double snr_db, std::uint64_t seed) {
    const auto& x = buffer.samples();
    const std::size_t n = x.size();
    const double signal_power = kernels::sum_squares(x.data(), n);
    if (n == 0 || signal_power == 0.0) {
        throw SilentSignal("cannot set an SNR against a silent signal");
    }

    GaussianSource gauss(seed);
    std::vector<double> noise(n);
    for (std::size_t i = 0; i < n; ++i) noise[i] = gauss.next();

    const double signal_rms = std::sqrt(signal_power / static_cast<double>(n));
    const double noise_rms = std::sqrt(kernels::sum_squares(noise.data(), n) /
                                       static_cast<double>(n));
    const double wanted_noise_rms = signal_rms / std::pow(10.0, snr_db / 20.0);
    const double gain = wanted_noise_rms / noise_rms;

    std::vector<double> out = x;
    kernels::axpy(gain, noise.data(), out.data(), n);
    return AudioBuffer(std::move(out), buffer.sample_rate_hz(), buffer.channels());
}

AudioBuffer hard_clip(const AudioBuffer& buffer, double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw OutOfRange("clip threshold must be in (0, 1], got " + std::to_string(threshold));
    }
    std::vector<double> out(buffer.samples().size());
    kernels::clamp(buffer.samples().data(), out.data(), out.size(), threshold);
    return AudioBuffer(std::move(out), buffer.sample_rate_hz(), buffer.channels());
}

double measure_snr(const AudioBuffer& clean, const AudioBuffer& degraded) {
    if (clean.samples().size() != degraded.samples().size()) {
        throw LengthMismatch("buffers differ in length: " +
                             std::to_string(clean.samples().size()) + " vs " +
                             std::to_string(degraded.samples().size()));
    }
    if (clean.sample_rate_hz() != degraded.sample_rate_hz()) {
        throw RateMismatch("buffers differ in sample rate");
    }
    const std::size_t n = clean.samples().size();
    const double signal_power = kernels::sum_squares(clean.samples().data(), n);
    const double noise_power =
        kernels::sum_squared_diff(degraded.samples().data(), clean.samples().data(), n);
    if (noise_power == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(signal_power / noise_power);
}

}  // namespace medpipe
