#pragma once

#include <vector>

#include "medpipe/audio.hpp"

namespace medpipe {

// STFT magnitude statistics of a noise-only stretch of audio.
// bin_floor[k] is the mean magnitude of bin k across the profiled frames,
// bin_spread[k] the standard deviation of those magnitudes. The spread is what
// lets the gate tell steady deterministic content (spread near zero relative
// to the mean) from broadband noise (relative spread around 0.5); profiles
// built by hand may leave bin_spread empty, which the gate treats as "assume
// noise" for every bin.
struct NoiseProfile {
    std::vector<double> bin_floor;   // fft_size/2 + 1 entries
    std::vector<double> bin_spread;  // same length, or empty
    int fft_size;
    int hop_size;
    int sample_rate_hz;
};

struct GateConfig {
    double threshold_factor = 1.5;  // gate opens below threshold_factor * floor
    double reduction_db = -30.0;    // gain applied to gated bins, <= 0
    int attack_frames = 2;          // frames to ramp a bin back open
    int release_frames = 4;         // frames to ramp a bin down to the floor gain
};

inline constexpr int kDefaultFftSize = 1024;
inline constexpr int kDefaultHopSize = 256;
inline constexpr double kDefaultNoiseMs = 250.0;

// Profiles the leading noise_ms milliseconds of a mono buffer using a periodic
// Hann window. Raises BufferTooShort when the buffer is shorter than noise_ms
// or the segment covers fewer than 4 analysis frames.
NoiseProfile estimate_noise_profile(const AudioBuffer& buffer, double noise_ms = kDefaultNoiseMs,
                                    int fft_size = kDefaultFftSize,
                                    int hop_size = kDefaultHopSize);

// Per-bin downward expander. A bin is attenuated toward reduction_db while its
// trailing mean magnitude (16 frames) sits below threshold_factor times the
// smoothed profile floor and the profile marked the bin as noise-like.
// Output length equals input length; a threshold_factor of 0 (or an all-zero
// floor) passes the signal through unchanged apart from STFT round-trip
// rounding, which is below -300 dBFS. Raises RateMismatch when the profile was
// built at a different sample rate.
AudioBuffer spectral_gate(const AudioBuffer& buffer, const NoiseProfile& profile,
                          const GateConfig& config = {});

// estimate_noise_profile on the first noise_ms of the buffer, then
// spectral_gate with default settings. The buffer must be mono and at least
// noise_ms long.
AudioBuffer denoise(const AudioBuffer& buffer, double noise_ms = kDefaultNoiseMs);

}  // namespace medpipe
