#include "medpipe/audio.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"

namespace medpipe {

AudioBuffer::AudioBuffer() : sample_rate_hz_(16000), channels_(1) {}

AudioBuffer::AudioBuffer(std::vector<double> samples, int sample_rate_hz, int channels)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz), channels_(channels) {
    if (channels_ < 1) {
        throw InvalidBuffer("channel count must be at least 1, got " + std::to_string(channels_));
    }
    if (sample_rate_hz_ < 8000) {
        throw InvalidBuffer("sample rate must be at least 8000 Hz, got " +
                            std::to_string(sample_rate_hz_));
    }
    if (samples_.size() % static_cast<std::size_t>(channels_) != 0) {
        throw InvalidBuffer("sample count " + std::to_string(samples_.size()) +
                            " is not a multiple of the channel count " + std::to_string(channels_));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw InvalidBuffer("non-finite sample at index " + std::to_string(i));
        }
    }
}

double AudioBuffer::duration_ms() const {
    return 1000.0 * static_cast<double>(frames()) / static_cast<double>(sample_rate_hz_);
}

SignalStats signal_stats(const AudioBuffer& buffer, double clip_threshold) {
    if (buffer.empty()) {
        throw EmptyBuffer("signal_stats needs at least one sample");
    }
    if (!(clip_threshold > 0.0) || clip_threshold > 1.0) {
        throw OutOfRange("clip threshold must be in (0, 1], got " + std::to_string(clip_threshold));
    }
    const auto& x = buffer.samples();
    const std::size_t n = x.size();
    SignalStats stats{};
    stats.peak = kernels::peak_abs(x.data(), n);
    stats.rms = std::sqrt(kernels::sum_squares(x.data(), n) / static_cast<double>(n));
    stats.rms_dbfs = stats.rms > 0.0 ? 20.0 * std::log10(stats.rms)
                                     : -std::numeric_limits<double>::infinity();
    stats.clipped_fraction =
        static_cast<double>(kernels::count_abs_ge(x.data(), n, clip_threshold)) /
        static_cast<double>(n);
    return stats;
}

AudioBuffer downmix_mono(const AudioBuffer& buffer) {
    if (buffer.channels() == 1) {
        return buffer;
    }
    const auto& x = buffer.samples();
    const std::size_t frames = buffer.frames();
    std::vector<double> mono(frames);
    if (buffer.channels() == 2) {
        kernels::downmix_stereo(x.data(), mono.data(), frames);
    } else {
        const std::size_t ch = static_cast<std::size_t>(buffer.channels());
        const double inv = 1.0 / static_cast<double>(ch);
        for (std::size_t f = 0; f < frames; ++f) {
            double sum = 0.0;
            for (std::size_t c = 0; c < ch; ++c) sum += x[f * ch + c];
            mono[f] = sum * inv;
        }
    }
    return AudioBuffer(std::move(mono), buffer.sample_rate_hz(), 1);
}

}  // namespace medpipe
