#include "medpipe/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "medpipe/errors.hpp"
#include "medpipe/wav.hpp"

namespace medpipe {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
auto timed_stage(const char* name, StageTimings& timings, F&& body) {
    const auto start = Clock::now();
    try {
        auto result = body();
        timings[name] = ms_since(start);
        return result;
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure(name, e.what());
    }
}

}  // namespace

PreprocessResult preprocess(const AudioBuffer& input, const PipelineConfig& config) {
    if (input.empty()) {
        throw EmptyBuffer("pipeline input is empty");
    }
    if (!(config.clip_threshold > 0.0) || config.clip_threshold > 1.0) {
        throw OutOfRange("clip_threshold must be in (0, 1]");
    }

    StageTimings timings;
    AudioBuffer mono = timed_stage("downmix", timings, [&] { return downmix_mono(input); });

    AudioBuffer quiet = config.denoise_enabled
                            ? timed_stage("denoise", timings,
                                          [&] {
                                              const NoiseProfile profile =
                                                  estimate_noise_profile(mono, config.noise_ms);
                                              return spectral_gate(mono, profile, config.gate);
                                          })
                            : std::move(mono);
    if (!config.denoise_enabled) {
        timings["denoise"] = 0.0;
    }

    AudioBuffer shaped =
        timed_stage("equalize", timings, [&] { return equalize(quiet, config.eq); });
    AudioBuffer resampled =
        timed_stage("resample", timings, [&] { return resample(shaped, config.target_rate_hz); });

    PreprocessResult out{std::move(resampled), std::move(timings), SignalStats{}};
    out.stats = signal_stats(out.audio, config.clip_threshold);
    return out;
}

PipelineResult run(const AudioBuffer& input, const PipelineConfig& config, AsrBackend& asr,
                   LlmBackend& llm) {
    PreprocessResult pre = preprocess(input, config);

    Transcription transcription = timed_stage("asr", pre.timings_ms,
                                              [&] { return transcribe(asr, pre.audio); });
    Label label = timed_stage("llm", pre.timings_ms, [&] {
        return classify(llm, config.llm.prompt_template, transcription.raw_text);
    });

    PipelineResult result;
    result.transcript = std::move(transcription.words);
    result.raw_transcript = std::move(transcription.raw_text);
    result.label = std::move(label);
    result.stage_timings_ms = std::move(pre.timings_ms);
    result.preprocessed_stats = pre.stats;
    return result;
}

namespace {

RecordOutcome run_one(const DatasetRecord& record, const PipelineConfig& config,
                      const BatchOptions& options, AsrBackend& asr, LlmBackend& llm) {
    RecordOutcome outcome;
    outcome.id = record.id;
    try {
        const std::filesystem::path audio_path =
            options.audio_root.empty() ? std::filesystem::path(record.audio_path)
                                       : std::filesystem::path(options.audio_root) /
                                             record.audio_path;
        const AudioBuffer audio = load_wav(audio_path.string());
        PipelineResult result = run(audio, config, asr, llm);

        outcome.raw_transcript = std::move(result.raw_transcript);
        outcome.label = result.label.value;
        outcome.timings_ms = std::move(result.stage_timings_ms);
        if (options.score) {
            outcome.gold_phrase = record.phrase;
            outcome.gold_label = record.prompt;
            const WordSequence reference = normalize_tokens(record.phrase);
            if (reference.empty()) {
                throw EmptyReference("manifest phrase normalizes to zero words");
            }
            outcome.breakdown = wer(reference, result.transcript);
            outcome.label_match = outcome.label == record.prompt;
        }
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace

BatchReport run_batch(const std::vector<DatasetRecord>& records, const PipelineConfig& config,
                      const BatchOptions& options, const AsrFactory& make_asr,
                      const LlmFactory& make_llm) {
    BatchReport report;
    report.records.resize(records.size());

    int workers = options.workers > 0 ? options.workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::size_t>(workers) > records.size()) {
        workers = static_cast<int>(records.size());
    }

    std::atomic<std::size_t> next{0};
    auto worker_loop = [&] {
        const std::unique_ptr<AsrBackend> asr = make_asr();
        const std::unique_ptr<LlmBackend> llm = make_llm();
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) break;
            report.records[i] = run_one(records[i], config, options, *asr, *llm);
        }
    };

    if (workers <= 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
        for (std::thread& t : pool) t.join();
    }

    std::size_t errors = 0;
    std::size_t reference_words = 0;
    for (const RecordOutcome& outcome : report.records) {
        if (!outcome.ok) {
            ++report.failures;
            continue;
        }
        if (outcome.breakdown) {
            ++report.scored;
            if (outcome.label_match) ++report.matches;
            errors += outcome.breakdown->substitutions + outcome.breakdown->deletions +
                      outcome.breakdown->insertions;
            reference_words += outcome.breakdown->reference_length;
        }
    }
    if (reference_words > 0) {
        report.corpus_wer = static_cast<double>(errors) / static_cast<double>(reference_words);
    }
    return report;
}

std::string report_to_json(const BatchReport& report, bool scored, int indent) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const RecordOutcome& outcome : report.records) {
        nlohmann::ordered_json row;
        row["id"] = outcome.id;
        if (!outcome.ok) {
            row["error"] = outcome.error;
            records.push_back(std::move(row));
            continue;
        }
        row["transcript"] = outcome.raw_transcript;
        row["label"] = outcome.label;
        if (scored && outcome.breakdown) {
            row["gold_phrase"] = outcome.gold_phrase;
            row["gold_label"] = outcome.gold_label;
            row["wer"] = outcome.breakdown->wer;
            row["match"] = outcome.label_match;
        }
        nlohmann::ordered_json timings;
        for (const auto& [stage, ms] : outcome.timings_ms) timings[stage] = ms;
        row["timings"] = std::move(timings);
        records.push_back(std::move(row));
    }

    nlohmann::ordered_json summary;
    if (report.corpus_wer) {
        summary["corpus_wer"] = *report.corpus_wer;
    }
    if (report.scored > 0) {
        summary["accuracy"] =
            static_cast<double>(report.matches) / static_cast<double>(report.scored);
    }
    summary["failures"] = report.failures;

    nlohmann::ordered_json root;
    root["records"] = std::move(records);
    root["summary"] = std::move(summary);
    return root.dump(indent);
}

namespace {

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (const char* k : known) {
            if (key == k) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw InvalidConfig("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path, const PipelineConfig& base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open config '" + path + "'");
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InvalidConfig("config '" + path + "' is not a JSON object");
    }

    PipelineConfig config = base;
    reject_unknown_keys(j,
                        {"denoise_enabled", "noise_ms", "gate", "eq", "target_rate_hz",
                         "clip_threshold", "asr", "llm"},
                        "config");
    config.denoise_enabled = j.value("denoise_enabled", config.denoise_enabled);
    config.noise_ms = j.value("noise_ms", config.noise_ms);
    config.target_rate_hz = j.value("target_rate_hz", config.target_rate_hz);
    config.clip_threshold = j.value("clip_threshold", config.clip_threshold);
    if (j.contains("gate")) {
        const auto& g = j["gate"];
        reject_unknown_keys(g, {"threshold_factor", "reduction_db", "attack_frames",
                                "release_frames"},
                            "gate");
        config.gate.threshold_factor = g.value("threshold_factor", config.gate.threshold_factor);
        config.gate.reduction_db = g.value("reduction_db", config.gate.reduction_db);
        config.gate.attack_frames = g.value("attack_frames", config.gate.attack_frames);
        config.gate.release_frames = g.value("release_frames", config.gate.release_frames);
    }
    if (j.contains("eq")) {
        const auto& e = j["eq"];
        reject_unknown_keys(e, {"stages"}, "eq");
        if (e.contains("stages")) {
            config.eq.stages.clear();
            for (const auto& s : e["stages"]) {
                reject_unknown_keys(s, {"kind", "frequency_hz", "q", "gain_db"}, "eq stage");
                if (!s.contains("kind") || !s.contains("frequency_hz")) {
                    throw InvalidConfig("each eq stage needs 'kind' and 'frequency_hz'");
                }
                FilterStageSpec stage;
                stage.kind = filter_kind_from_string(s["kind"].get<std::string>());
                stage.frequency_hz = s["frequency_hz"].get<double>();
                stage.q = s.value("q", stage.q);
                stage.gain_db = s.value("gain_db", stage.gain_db);
                config.eq.stages.push_back(stage);
            }
        }
    }
    if (j.contains("asr")) {
        const auto& a = j["asr"];
        reject_unknown_keys(a, {"endpoint_url", "timeout_ms", "audio_encoding", "auth_token"},
                            "asr");
        config.asr.endpoint_url = a.value("endpoint_url", config.asr.endpoint_url);
        config.asr.timeout_ms = a.value("timeout_ms", config.asr.timeout_ms);
        config.asr.audio_encoding = a.value("audio_encoding", config.asr.audio_encoding);
        config.asr.auth_token = a.value("auth_token", config.asr.auth_token);
    }
    if (j.contains("llm")) {
        const auto& l = j["llm"];
        reject_unknown_keys(l, {"endpoint_url", "timeout_ms", "prompt_template", "auth_token"},
                            "llm");
        config.llm.endpoint_url = l.value("endpoint_url", config.llm.endpoint_url);
        config.llm.timeout_ms = l.value("timeout_ms", config.llm.timeout_ms);
        config.llm.prompt_template = l.value("prompt_template", config.llm.prompt_template);
        config.llm.auth_token = l.value("auth_token", config.llm.auth_token);
    }
    return config;
}

}  // namespace medpipe
