#pragma once

#include <cstdint>

#include "medpipe/audio.hpp"

namespace medpipe {

// Adds white Gaussian noise at the requested SNR, measured against the
// buffer's own RMS. The generator is mt19937_64 seeded with `seed`, shaped by
// the Box-Muller transform, so the same (buffer, snr_db, seed) triple yields
// the same output on every platform and standard library. The generated noise
// block is scaled by its measured RMS, not its expected RMS, so
// measure_snr(input, output) returns snr_db exactly (up to rounding).
// A digitally silent buffer has no defined SNR and raises SilentSignal.
AudioBuffer add_white_noise(const AudioBuffer& buffer, double snr_db, std::uint64_t seed);

// Clamps every sample to [-threshold, threshold]. threshold must be in (0, 1],
// otherwise OutOfRange.
AudioBuffer hard_clip(const AudioBuffer& buffer, double threshold);

// 10*log10(sum(clean^2) / sum((degraded-clean)^2)) in dB. Buffers must match
// in length (LengthMismatch) and rate (RateMismatch). Identical buffers have
// no noise to measure: returns +infinity.
double measure_snr(const AudioBuffer& clean, const AudioBuffer& degraded);

}  // namespace medpipe
