#include "medpipe/equalizer.hpp"

#include "medpipe/errors.hpp"

namespace medpipe {

const char* to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::high_pass: return "high_pass";
        case FilterKind::low_pass: return "low_pass";
        case FilterKind::high_shelf: return "high_shelf";
    }
    return "?";
}

FilterKind filter_kind_from_string(const std::string& name) {
    if (name == "high_pass") return FilterKind::high_pass;
    if (name == "low_pass") return FilterKind::low_pass;
    if (name == "high_shelf") return FilterKind::high_shelf;
    throw InvalidConfig("unknown filter kind '" + name + "'");
}

EqualizerSpec default_equalizer_spec() {
    EqualizerSpec spec;
    spec.stages.push_back({FilterKind::high_pass, 250.0, 0.7071067811865476, 0.0});
    spec.stages.push_back({FilterKind::low_pass, 11000.0, 0.7071067811865476, 0.0});
    spec.stages.push_back({FilterKind::high_shelf, 4000.0, 0.7071067811865476, 3.0});
    return spec;
}

BiquadCoefficients design_stage(const FilterStageSpec& stage, int sample_rate_hz) {
    switch (stage.kind) {
        case FilterKind::high_pass:
            return design_high_pass(sample_rate_hz, stage.frequency_hz, stage.q);
        case FilterKind::low_pass:
            return design_low_pass(sample_rate_hz, stage.frequency_hz, stage.q);
        case FilterKind::high_shelf:
            return design_high_shelf(sample_rate_hz, stage.frequency_hz, stage.gain_db, stage.q);
    }
    throw InvalidConfig("unknown filter kind");
}

namespace {

bool stage_is_skippable(const FilterStageSpec& stage, int sample_rate_hz) {
    if (stage.frequency_hz < static_cast<double>(sample_rate_hz) / 2.0) return false;
    if (stage.kind == FilterKind::high_pass) {
        throw FrequencyOutOfRange("high_pass corner at or above Nyquist would discard the whole "
                                  "band");
    }
    return true;
}

}  // namespace

AudioBuffer equalize(const AudioBuffer& buffer, const EqualizerSpec& spec) {
    AudioBuffer out = buffer;
    for (const FilterStageSpec& stage : spec.stages) {
        if (stage_is_skippable(stage, buffer.sample_rate_hz())) continue;
        out = apply_biquad(out, design_stage(stage, buffer.sample_rate_hz()));
    }
    return out;
}

std::complex<double> cascade_response(const EqualizerSpec& spec, double frequency_hz,
                                      int sample_rate_hz) {
    std::complex<double> h{1.0, 0.0};
    for (const FilterStageSpec& stage : spec.stages) {
        if (stage_is_skippable(stage, sample_rate_hz)) continue;
        h *= frequency_response(design_stage(stage, sample_rate_hz), frequency_hz, sample_rate_hz);
    }
    return h;
}

}  // namespace medpipe
