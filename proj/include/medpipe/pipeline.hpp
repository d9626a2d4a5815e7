#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medpipe/audio.hpp"
#include "medpipe/dataset.hpp"
#include "medpipe/denoise.hpp"
#include "medpipe/equalizer.hpp"
#include "medpipe/inference.hpp"

namespace medpipe {

struct PipelineConfig {
    bool denoise_enabled = true;
    double noise_ms = kDefaultNoiseMs;
    GateConfig gate{};
    EqualizerSpec eq = default_equalizer_spec();
    int target_rate_hz = 16000;
    double clip_threshold = 0.999;  // for the reported stats only
    AsrBackendConfig asr{};
    LlmBackendConfig llm{};
};

// Stage names, also the keys of stage_timings: downmix, denoise, equalize,
// resample, asr, llm. A disabled denoise stage is reported with 0 ms.
using StageTimings = std::map<std::string, double>;

struct PreprocessResult {
    AudioBuffer audio;
    StageTimings timings_ms;  // downmix, denoise, equalize, resample
    SignalStats stats;
};

struct PipelineResult {
    WordSequence transcript;     // normalized words
    std::string raw_transcript;  // verbatim ASR output
    Label label;
    StageTimings stage_timings_ms;  // all six stages
    SignalStats preprocessed_stats;
};

// downmix -> denoise -> equalize -> resample. Every failure is wrapped in
// StageFailure carrying the stage name, so a preprocessing error can never be
// mistaken for a backend one.
PreprocessResult preprocess(const AudioBuffer& input, const PipelineConfig& config);

// preprocess, then transcribe, then classify, with per-stage timings.
PipelineResult run(const AudioBuffer& input, const PipelineConfig& config, AsrBackend& asr,
                   LlmBackend& llm);

// One backend pair per worker; backends need not be thread-safe.
using AsrFactory = std::function<std::unique_ptr<AsrBackend>()>;
using LlmFactory = std::function<std::unique_ptr<LlmBackend>()>;

struct BatchOptions {
    bool score = false;       // compare against the manifest phrase/prompt
    int workers = 0;          // 0 = hardware concurrency
    std::string audio_root;   // records' audio_path is relative to this
};

struct RecordOutcome {
    std::string id;
    bool ok = false;
    std::string error;  // what() of the failure when !ok
    std::string raw_transcript;
    std::string label;
    StageTimings timings_ms;
    // scoring fields, valid when ok and the batch was scored
    std::string gold_phrase;
    std::string gold_label;
    std::optional<WerBreakdown> breakdown;
    bool label_match = false;
};

struct BatchReport {
    std::vector<RecordOutcome> records;  // manifest order
    std::size_t failures = 0;
    std::optional<double> corpus_wer;  // micro-average over scored successes
    std::size_t matches = 0;
    std::size_t scored = 0;
};

// Runs every record, isolating failures: one bad record is reported and the
// rest of the batch continues. Worker threads pull records on demand but the
// report always keeps manifest order.
BatchReport run_batch(const std::vector<DatasetRecord>& records, const PipelineConfig& config,
                      const BatchOptions& options, const AsrFactory& make_asr,
                      const LlmFactory& make_llm);

// {"records": [...], "summary": {"corpus_wer"?, "accuracy"?, "failures"}}.
// Successful rows: id, transcript, label, gold_phrase?, gold_label?, wer?,
// match?, timings. Failed rows: id, error.
std::string report_to_json(const BatchReport& report, bool scored, int indent = 2);

// JSON pipeline settings with keys mirroring PipelineConfig field names;
// unknown keys are rejected. Values present in the file override `base`.
PipelineConfig load_pipeline_config(const std::string& path, const PipelineConfig& base = {});

}  // namespace medpipe
