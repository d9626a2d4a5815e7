#include "medpipe/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/fft.hpp"
#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"

namespace medpipe {

namespace {

// Frames whose trailing-mean magnitude decides the gate. Overlapping frames
// are strongly correlated, so a single frame is a poor noise estimate; a tone
// still shoots past the threshold within a frame or two because it sits orders
// of magnitude above the floor.
constexpr int kDecisionWindowFrames = 16;
// The profile sees only ~a dozen independent looks per bin, so the raw floor
// has double-digit percent error; averaging across neighbouring bins keeps
// under-estimated bins from leaking noise forever.
constexpr int kFloorSmoothRadius = 8;
// Bins whose profile spread is below this fraction of their floor are steady
// deterministic content (a hum, a tone), not noise, and are never gated.
constexpr double kSteadyRelSpread = 1e-6;

std::vector<double> hann_periodic(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] =
            0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
    }
    return w;
}

void check_stft_params(int fft_size, int hop_size) {
    if (fft_size < 16 || (fft_size & (fft_size - 1)) != 0) {
        throw InvalidConfig("fft_size must be a power of two >= 16, got " +
                            std::to_string(fft_size));
    }
    if (hop_size < 1 || hop_size > fft_size) {
        throw InvalidConfig("hop_size must be in [1, fft_size], got " + std::to_string(hop_size));
    }
}

void require_mono(const AudioBuffer& buffer, const char* op) {
    if (buffer.channels() != 1) {
        throw InvalidBuffer(std::string(op) + " expects a mono buffer; downmix first");
    }
}

std::vector<double> box_smooth(const std::vector<double>& v, int radius) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<double> out(v.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - radius);
        const std::ptrdiff_t hi = std::min(n - 1, k + radius);
        double sum = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(k)] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace

NoiseProfile estimate_noise_profile(const AudioBuffer& buffer, double noise_ms, int fft_size,
                                    int hop_size) {
    require_mono(buffer, "estimate_noise_profile");
    check_stft_params(fft_size, hop_size);
    if (!(noise_ms > 0.0)) {
        throw InvalidConfig("noise_ms must be positive");
    }

    const auto noise_samples = static_cast<std::size_t>(
        std::llround(noise_ms * buffer.sample_rate_hz() / 1000.0));
    if (noise_samples > buffer.samples().size()) {
        throw BufferTooShort("buffer (" + std::to_string(buffer.duration_ms()) +
                             " ms) is shorter than the noise segment (" + std::to_string(noise_ms) +
                             " ms)");
    }
    const auto fft_sz = static_cast<std::size_t>(fft_size);
    const auto hop = static_cast<std::size_t>(hop_size);
    const std::size_t frame_count =
        noise_samples >= fft_sz ? (noise_samples - fft_sz) / hop + 1 : 0;
    if (frame_count < 4) {
        throw BufferTooShort("noise segment covers " + std::to_string(frame_count) +
                             " analysis frames; at least 4 are required");
    }

    const std::size_t bins = fft_sz / 2 + 1;
    const std::vector<double> window = hann_periodic(fft_size);
    detail::FftPlan plan(fft_sz);
    const auto& x = buffer.samples();

    std::vector<double> re(fft_sz);
    std::vector<double> im(fft_sz);
    std::vector<double> mags(frame_count * bins);
    for (std::size_t f = 0; f < frame_count; ++f) {
        kernels::multiply(x.data() + f * hop, window.data(), re.data(), fft_sz);
        std::fill(im.begin(), im.end(), 0.0);
        plan.forward(re.data(), im.data());
        kernels::complex_magnitude(re.data(), im.data(), mags.data() + f * bins, bins);
    }

    NoiseProfile profile;
    profile.bin_floor.assign(bins, 0.0);
    profile.bin_spread.assign(bins, 0.0);
    profile.fft_size = fft_size;
    profile.hop_size = hop_size;
    profile.sample_rate_hz = buffer.sample_rate_hz();
    for (std::size_t k = 0; k < bins; ++k) {
        double mean = 0.0;
        for (std::size_t f = 0; f < frame_count; ++f) mean += mags[f * bins + k];
        mean /= static_cast<double>(frame_count);
        double var = 0.0;
        for (std::size_t f = 0; f < frame_count; ++f) {
            const double d = mags[f * bins + k] - mean;
            var += d * d;
        }
        profile.bin_floor[k] = mean;
        profile.bin_spread[k] = std::sqrt(var / static_cast<double>(frame_count));
    }
    return profile;
}

AudioBuffer spectral_gate(const AudioBuffer& buffer, const NoiseProfile& profile,
                          const GateConfig& config) {
    require_mono(buffer, "spectral_gate");
    check_stft_params(profile.fft_size, profile.hop_size);
    if (buffer.sample_rate_hz() != profile.sample_rate_hz) {
        throw RateMismatch("profile was built at " + std::to_string(profile.sample_rate_hz) +
                           " Hz but the buffer is at " + std::to_string(buffer.sample_rate_hz()) +
                           " Hz");
    }
    const std::size_t bins = static_cast<std::size_t>(profile.fft_size) / 2 + 1;
    if (profile.bin_floor.size() != bins) {
        throw InvalidConfig("bin_floor must have fft_size/2 + 1 entries");
    }
    if (!profile.bin_spread.empty() && profile.bin_spread.size() != bins) {
        throw InvalidConfig("bin_spread must be empty or have fft_size/2 + 1 entries");
    }
    if (!(config.threshold_factor >= 0.0)) {
        throw InvalidConfig("threshold_factor must be non-negative");
    }
    if (!(config.reduction_db <= 0.0)) {
        throw InvalidConfig("reduction_db must be at most 0");
    }
    if (config.attack_frames < 0 || config.release_frames < 0) {
        throw InvalidConfig("attack_frames and release_frames must be non-negative");
    }
    if (buffer.empty()) {
        return buffer;
    }

    const auto fft_sz = static_cast<std::size_t>(profile.fft_size);
    const auto hop = static_cast<std::size_t>(profile.hop_size);
    const std::size_t n = buffer.samples().size();

    // Lead padding keeps the first input sample fully covered by overlapping
    // frames; tail padding does the same for the last one.
    const std::size_t lead = fft_sz - hop;
    const std::size_t padded_len = lead + n + fft_sz;
    std::vector<double> padded(padded_len, 0.0);
    std::copy(buffer.samples().begin(), buffer.samples().end(), padded.begin() + lead);

    const std::vector<double> floor_sm = box_smooth(profile.bin_floor, kFloorSmoothRadius);
    std::vector<char> noise_like(bins, 1);
    if (!profile.bin_spread.empty()) {
        const std::vector<double> spread_sm = box_smooth(profile.bin_spread, kFloorSmoothRadius);
        for (std::size_t k = 0; k < bins; ++k) {
            noise_like[k] = spread_sm[k] > kSteadyRelSpread * floor_sm[k] ? 1 : 0;
        }
    }

    const double floor_gain = std::pow(10.0, config.reduction_db / 20.0);
    const double open_step = (1.0 - floor_gain) / std::max(1, config.attack_frames);
    const double close_step = (1.0 - floor_gain) / std::max(1, config.release_frames);

    const std::vector<double> window = hann_periodic(profile.fft_size);
    detail::FftPlan plan(fft_sz);

    std::vector<double> re(fft_sz);
    std::vector<double> im(fft_sz);
    std::vector<double> mag(bins);
    std::vector<double> gain(bins, 1.0);
    std::vector<double> gain_full(fft_sz);
    std::vector<double> history(static_cast<std::size_t>(kDecisionWindowFrames) * bins, 0.0);
    std::vector<double> trailing_sum(bins, 0.0);
    std::vector<double> out_acc(padded_len, 0.0);
    std::vector<double> win_acc(padded_len, 0.0);

    std::size_t frame_index = 0;
    for (std::size_t t = 0; t + fft_sz <= padded_len; t += hop, ++frame_index) {
        kernels::multiply(padded.data() + t, window.data(), re.data(), fft_sz);
        std::fill(im.begin(), im.end(), 0.0);
        plan.forward(re.data(), im.data());
        kernels::complex_magnitude(re.data(), im.data(), mag.data(), bins);

        const std::size_t slot = frame_index % kDecisionWindowFrames;
        double* evicted = history.data() + slot * bins;
        const auto denom = static_cast<double>(
            std::min<std::size_t>(frame_index + 1, kDecisionWindowFrames));
        for (std::size_t k = 0; k < bins; ++k) {
            trailing_sum[k] += mag[k] - evicted[k];
            evicted[k] = mag[k];
            const double decision = trailing_sum[k] / denom;
            const bool gated =
                noise_like[k] != 0 && decision < config.threshold_factor * floor_sm[k];
            const double target = gated ? floor_gain : 1.0;
            gain[k] = std::min(std::max(target, gain[k] - close_step), gain[k] + open_step);
        }

        gain_full[0] = gain[0];
        for (std::size_t k = 1; k < bins; ++k) {
            gain_full[k] = gain[k];
            if (fft_sz - k > bins - 1) gain_full[fft_sz - k] = gain[k];
        }
        kernels::apply_gain(re.data(), im.data(), gain_full.data(), fft_sz);
        plan.inverse(re.data(), im.data());

        kernels::axpy(1.0, re.data(), out_acc.data() + t, fft_sz);
        kernels::axpy(1.0, window.data(), win_acc.data() + t, fft_sz);
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = win_acc[lead + i];
        out[i] = w > 1e-12 ? out_acc[lead + i] / w : 0.0;
    }
    return AudioBuffer(std::move(out), buffer.sample_rate_hz(), 1);
}

AudioBuffer denoise(const AudioBuffer& buffer, double noise_ms) {
    const NoiseProfile profile = estimate_noise_profile(buffer, noise_ms);
    return spectral_gate(buffer, profile, GateConfig{});
}

}  // namespace medpipe
