#pragma once

#include <cstddef>
#include <vector>

namespace medpipe {

// Interleaved audio samples. Immutable once constructed; the constructor
// enforces the invariants (every sample finite, length a multiple of the
// channel count, rate at least 8000 Hz, at least one channel). Samples are
// stored as double: the filter contracts in this library are tighter than
// float32 quantization allows.
class AudioBuffer {
  public:
    AudioBuffer();  // empty mono buffer at 16 kHz
    AudioBuffer(std::vector<double> samples, int sample_rate_hz, int channels);

    const std::vector<double>& samples() const { return samples_; }
    int sample_rate_hz() const { return sample_rate_hz_; }
    int channels() const { return channels_; }

    std::size_t frames() const { return samples_.size() / static_cast<std::size_t>(channels_); }
    double duration_ms() const;
    bool empty() const { return samples_.empty(); }

  private:
    std::vector<double> samples_;
    int sample_rate_hz_;
    int channels_;
};

struct SignalStats {
    double peak;              // max |sample|
    double rms;               // sqrt(mean(sample^2))
    double rms_dbfs;          // 20*log10(rms); -inf for digital silence
    double clipped_fraction;  // fraction of samples with |sample| >= clip threshold
};

// Raises EmptyBuffer for a zero-length buffer, OutOfRange unless
// 0 < clip_threshold <= 1.
SignalStats signal_stats(const AudioBuffer& buffer, double clip_threshold = 0.999);

// Arithmetic mean across channels. A mono buffer comes back as an identical
// copy, bit for bit.
AudioBuffer downmix_mono(const AudioBuffer& buffer);

// Windowed-sinc rate conversion (32-tap Kaiser-windowed polyphase bank with
// 512 branches and linear interpolation between them). Mono input only.
// target_rate_hz below 8000 raises UnsupportedRate. Equal input and output
// rates return an identical copy.
AudioBuffer resample(const AudioBuffer& buffer, int target_rate_hz);

}  // namespace medpipe
