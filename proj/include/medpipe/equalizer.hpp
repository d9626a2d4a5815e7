#pragma once

#include <complex>
#include <string>
#include <vector>

#include "medpipe/biquad.hpp"

namespace medpipe {

enum class FilterKind { high_pass, low_pass, high_shelf };

const char* to_string(FilterKind kind);
FilterKind filter_kind_from_string(const std::string& name);

struct FilterStageSpec {
    FilterKind kind;
    double frequency_hz;
    double q = 0.7071067811865476;  // 1/sqrt(2), Butterworth
    double gain_db = 0.0;           // used by high_shelf only
};

struct EqualizerSpec {
    std::vector<FilterStageSpec> stages;
};

// The stock voice-cleanup chain: 250 Hz high-pass to cut rumble, 11 kHz
// low-pass to cut hiss, +3 dB shelf from 4 kHz for consonant clarity.
EqualizerSpec default_equalizer_spec();

BiquadCoefficients design_stage(const FilterStageSpec& stage, int sample_rate_hz);

// Runs the stages in order, each with fresh filter state. Low-pass and
// high-shelf stages whose corner sits at or above Nyquist are skipped: their
// limit behavior is a pass-through (nothing exists above Nyquist to cut or
// shelve), which keeps the default spec usable at 16 kHz. A high-pass corner
// at or above Nyquist would mean "remove everything" and raises
// FrequencyOutOfRange instead of being silently skipped.
AudioBuffer equalize(const AudioBuffer& buffer, const EqualizerSpec& spec);

// Product of the stage responses, with the same skip rule as equalize().
std::complex<double> cascade_response(const EqualizerSpec& spec, double frequency_hz,
                                      int sample_rate_hz);

}  // namespace medpipe
