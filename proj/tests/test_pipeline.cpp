#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medpipe/augment.hpp"
#include "medpipe/errors.hpp"
#include "medpipe/pipeline.hpp"
#include "medpipe/wav.hpp"
#include "support.hpp"

using namespace medpipe;
using testsupport::make_tone;
using testsupport::rms_of;
using testsupport::TempDir;

namespace {

PipelineConfig passthrough_config() {
    PipelineConfig config;
    config.denoise_enabled = false;
    config.eq.stages.clear();
    config.target_rate_hz = 16000;
    return config;
}

class CountingAsr : public AsrBackend {
  public:
    explicit CountingAsr(std::string text) : text_(std::move(text)) {}
    std::string transcribe_raw(const AudioBuffer&) override {
        ++calls;
        return text_;
    }
    int calls = 0;

  private:
    std::string text_;
};

}  // namespace

TEST_CASE("preprocess reports the four stage timings") {
    const AudioBuffer input = make_tone(440.0, 44100, 0.6, 0.4);
    const PreprocessResult result = preprocess(input, PipelineConfig{});
    const std::set<std::string> keys = {"downmix", "denoise", "equalize", "resample"};
    std::set<std::string> got;
    for (const auto& [name, ms] : result.timings_ms) {
        got.insert(name);
        CHECK(ms >= 0.0);
    }
    CHECK(got == keys);
    CHECK(result.audio.sample_rate_hz() == 16000);
    CHECK(result.audio.channels() == 1);
    CHECK(result.stats.rms > 0.0);
}

TEST_CASE("disabled denoise is reported as zero and does nothing else") {
    const AudioBuffer input = make_tone(440.0, 44100, 0.5, 0.4);
    PipelineConfig config;
    config.denoise_enabled = false;
    const PreprocessResult result = preprocess(input, config);
    CHECK(result.timings_ms.at("denoise") == 0.0);

    // equals the manual composition of the remaining stages
    const AudioBuffer manual = resample(equalize(downmix_mono(input), config.eq), 16000);
    CHECK(result.audio.samples() == manual.samples());
}

TEST_CASE("empty input is rejected before any stage runs") {
    CHECK_THROWS_AS(preprocess(AudioBuffer{}, PipelineConfig{}), EmptyBuffer);

    PipelineConfig bad;
    bad.clip_threshold = 0.0;
    CHECK_THROWS_AS(preprocess(make_tone(440.0, 16000, 0.5, 0.4), bad), OutOfRange);
}

TEST_CASE("the equalizer strips rumble before the backends see it") {
    // 60 Hz hum under a 1 kHz carrier
    const AudioBuffer hum = make_tone(60.0, 44100, 1.0, 0.45);
    const AudioBuffer voice = make_tone(1000.0, 44100, 1.0, 0.05);
    std::vector<double> mixed(hum.samples().size());
    for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] = hum.samples()[i] + voice.samples()[i];
    const AudioBuffer input(mixed, 44100, 1);

    PipelineConfig config;
    config.denoise_enabled = false;
    const PreprocessResult result = preprocess(input, config);

    const double in_rms = rms_of(input.samples(), 4410, input.samples().size() - 4410);
    const double out_rms =
        rms_of(result.audio.samples(), 1600, result.audio.samples().size() - 1600);
    CHECK(20.0 * std::log10(out_rms / in_rms) <= -6.0);
}

TEST_CASE("failures carry their stage name") {
    PipelineConfig config;

    // too short for the noise profile
    const AudioBuffer blip = make_tone(440.0, 16000, 0.05, 0.4);
    try {
        preprocess(blip, config);
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage == "denoise");
        CHECK(std::string(e.what()).find("stage 'denoise' failed") == 0);
    }

    config.denoise_enabled = false;
    config.eq.stages.push_back({FilterKind::high_pass, 9000.0});
    const AudioBuffer tone = make_tone(440.0, 16000, 0.5, 0.4);
    try {
        preprocess(tone, config);
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage == "equalize");
    }

    config.eq.stages.clear();
    config.target_rate_hz = 7999;
    try {
        preprocess(tone, config);
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage == "resample");
    }
}

TEST_CASE("preprocessing failures never reach the backends") {
    CountingAsr asr("words");
    MockLlmBackend llm({}, "Label");
    PipelineConfig config;
    config.target_rate_hz = 7999;
    const AudioBuffer tone = make_tone(440.0, 16000, 0.5, 0.4);
    CHECK_THROWS_AS(run(tone, config, asr, llm), StageFailure);
    CHECK(asr.calls == 0);
}

TEST_CASE("run reports all six stages and the backend results") {
    CountingAsr asr("My knee hurts a lot.");
    MockLlmBackend llm(std::vector<MockLlmBackend::Rule>{{"knee", "Knee pain"}});
    const AudioBuffer tone = make_tone(440.0, 16000, 0.6, 0.4);
    const PipelineResult result = run(tone, passthrough_config(), asr, llm);

    CHECK(result.raw_transcript == "My knee hurts a lot.");
    CHECK(result.transcript == WordSequence{"my", "knee", "hurts", "a", "lot"});
    CHECK(result.label.value == "Knee pain");
    CHECK(asr.calls == 1);

    std::set<std::string> keys;
    for (const auto& [name, ms] : result.stage_timings_ms) keys.insert(name);
    CHECK(keys == std::set<std::string>{"downmix", "denoise", "equalize", "resample", "asr", "llm"});
}

TEST_CASE("an asr failure is attributed to the asr stage") {
    MockAsrBackend strict{std::map<std::string, std::string>{}};
    MockLlmBackend llm({}, "Label");
    const AudioBuffer tone = make_tone(440.0, 16000, 0.5, 0.4);
    try {
        run(tone, passthrough_config(), strict, llm);
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage == "asr");
    }
}

TEST_CASE("batch runs score and isolate failures") {
    TempDir dir;
    std::filesystem::create_directories(dir.path / "test");
    const char* phrases[3] = {
        "My chest feels tight when I climb stairs.",
        "The wound on my arm is red and swollen.",
        "I get a sharp pain behind my eyes.",
    };
    std::vector<DatasetRecord> records;
    std::map<std::string, std::string> table;
    for (int i = 0; i < 3; ++i) {
        const std::string name = "rec" + std::to_string(i);
        DatasetRecord rec;
        rec.id = name;
        rec.phrase = phrases[i];
        rec.prompt = i == 0 ? "Hard to breath" : (i == 1 ? "Infected wound" : "Head ache");
        rec.audio_path = "test/" + name + ".wav";
        rec.split = Split::test;
        records.push_back(rec);

        if (i == 2) continue;  // leave the last file missing
        const AudioBuffer tone = make_tone(300.0 + 100.0 * i, 16000, 0.4, 0.4);
        save_wav(tone, (dir.path / rec.audio_path).string(), WavEncoding::float32);
        table[fingerprint(load_wav((dir.path / rec.audio_path).string()))] = phrases[i];
    }

    const PipelineConfig config = passthrough_config();
    BatchOptions options;
    options.score = true;
    options.workers = 1;
    options.audio_root = dir.path.string();
    const auto make_asr = [&] { return std::make_unique<MockAsrBackend>(table); };
    const auto make_llm = [] {
        return std::make_unique<MockLlmBackend>(
            std::vector<MockLlmBackend::Rule>{{"chest", "Hard to breath"},
                                              {"wound", "Infected wound"},
                                              {"eyes", "Head ache"}});
    };

    const BatchReport report = run_batch(records, config, options, make_asr, make_llm);
    REQUIRE(report.records.size() == 3);
    CHECK(report.records[0].id == "rec0");
    CHECK(report.records[1].id == "rec1");
    CHECK(report.records[2].id == "rec2");
    CHECK(report.records[0].ok);
    CHECK(report.records[1].ok);
    CHECK_FALSE(report.records[2].ok);
    CHECK_FALSE(report.records[2].error.empty());
    CHECK(report.failures == 1);
    CHECK(report.scored == 2);
    CHECK(report.matches == 2);
    REQUIRE(report.corpus_wer.has_value());
    CHECK(*report.corpus_wer == 0.0);
    CHECK(report.records[0].label_match);
    CHECK(report.records[0].gold_label == "Hard to breath");
    REQUIRE(report.records[0].breakdown.has_value());
    CHECK(report.records[0].breakdown->wer == 0.0);

    SUBCASE("worker count does not change the outcome") {
        BatchOptions three = options;
        three.workers = 3;
        const BatchReport parallel = run_batch(records, config, three, make_asr, make_llm);
        REQUIRE(parallel.records.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(parallel.records[i].id == report.records[i].id);
            CHECK(parallel.records[i].ok == report.records[i].ok);
            CHECK(parallel.records[i].raw_transcript == report.records[i].raw_transcript);
            CHECK(parallel.records[i].label == report.records[i].label);
        }
        CHECK(parallel.failures == report.failures);
        CHECK(parallel.matches == report.matches);
    }

    SUBCASE("report json shape") {
        const std::string text = report_to_json(report, true);
        const nlohmann::json j = nlohmann::json::parse(text);
        REQUIRE(j.contains("records"));
        REQUIRE(j.contains("summary"));
        REQUIRE(j["records"].size() == 3);

        const nlohmann::json& ok_row = j["records"][0];
        const std::set<std::string> ok_keys = {"id",         "transcript", "label",
                                               "gold_phrase", "gold_label", "wer",
                                               "match",      "timings"};
        std::set<std::string> got;
        for (const auto& [key, value] : ok_row.items()) got.insert(key);
        CHECK(got == ok_keys);
        CHECK(ok_row["transcript"] == phrases[0]);
        CHECK(ok_row["match"] == true);
        CHECK(ok_row["wer"] == 0.0);
        CHECK(ok_row["timings"].contains("asr"));

        const nlohmann::json& bad_row = j["records"][2];
        std::set<std::string> bad_keys;
        for (const auto& [key, value] : bad_row.items()) bad_keys.insert(key);
        CHECK(bad_keys == std::set<std::string>{"id", "error"});

        CHECK(j["summary"]["failures"] == 1);
        CHECK(j["summary"]["corpus_wer"] == 0.0);
        CHECK(j["summary"]["accuracy"] == 1.0);
    }

    SUBCASE("unscored batches omit the scoring fields") {
        BatchOptions plain = options;
        plain.score = false;
        const BatchReport unscored = run_batch(records, config, plain, make_asr, make_llm);
        CHECK_FALSE(unscored.corpus_wer.has_value());
        const nlohmann::json j = nlohmann::json::parse(report_to_json(unscored, false));
        std::set<std::string> got;
        for (const auto& [key, value] : j["records"][0].items()) got.insert(key);
        CHECK(got == std::set<std::string>{"id", "transcript", "label", "timings"});
        CHECK_FALSE(j["summary"].contains("corpus_wer"));
        CHECK_FALSE(j["summary"].contains("accuracy"));
    }
}

TEST_CASE("scoring rejects records whose reference normalizes to nothing") {
    TempDir dir;
    std::filesystem::create_directories(dir.path / "train");
    const AudioBuffer tone = make_tone(500.0, 16000, 0.4, 0.4);
    save_wav(tone, (dir.path / "train" / "odd.wav").string(), WavEncoding::float32);

    DatasetRecord rec;
    rec.id = "odd";
    rec.phrase = "...";  // strips to zero tokens
    rec.prompt = "Label";
    rec.audio_path = "train/odd.wav";
    rec.split = Split::train;

    BatchOptions options;
    options.score = true;
    options.workers = 1;
    options.audio_root = dir.path.string();
    const BatchReport report = run_batch(
        {rec}, passthrough_config(), options,
        [] { return std::make_unique<MockAsrBackend>(std::map<std::string, std::string>{}, "words"); },
        [] { return std::make_unique<MockLlmBackend>(std::vector<MockLlmBackend::Rule>{}, "L"); });
    REQUIRE(report.records.size() == 1);
    CHECK_FALSE(report.records[0].ok);
    CHECK(report.failures == 1);
}

TEST_CASE("pipeline config loads from json with overrides") {
    TempDir dir;
    const std::string path = dir.file("config.json");

    testsupport::write_file(path, R"({
        "denoise_enabled": false,
        "noise_ms": 300.0,
        "gate": {"threshold_factor": 2.0, "reduction_db": -20.0},
        "eq": {"stages": [{"kind": "high_pass", "frequency_hz": 100.0, "q": 0.9}]},
        "target_rate_hz": 22050,
        "clip_threshold": 0.9,
        "asr": {"endpoint_url": "http://a/", "timeout_ms": 123},
        "llm": {"endpoint_url": "http://b/"}
    })");
    const PipelineConfig config = load_pipeline_config(path);
    CHECK_FALSE(config.denoise_enabled);
    CHECK(config.noise_ms == 300.0);
    CHECK(config.gate.threshold_factor == 2.0);
    CHECK(config.gate.reduction_db == -20.0);
    CHECK(config.gate.attack_frames == 2);  // untouched default
    REQUIRE(config.eq.stages.size() == 1);
    CHECK(config.eq.stages[0].kind == FilterKind::high_pass);
    CHECK(config.eq.stages[0].frequency_hz == 100.0);
    CHECK(config.eq.stages[0].q == 0.9);
    CHECK(config.target_rate_hz == 22050);
    CHECK(config.asr.endpoint_url == "http://a/");
    CHECK(config.asr.timeout_ms == 123);
    CHECK(config.llm.endpoint_url == "http://b/");
    CHECK(config.llm.timeout_ms == 10000);

    SUBCASE("partial files override only their keys") {
        testsupport::write_file(path, R"({"target_rate_hz": 8000})");
        PipelineConfig base;
        base.denoise_enabled = false;
        const PipelineConfig merged = load_pipeline_config(path, base);
        CHECK(merged.target_rate_hz == 8000);
        CHECK_FALSE(merged.denoise_enabled);
        CHECK(merged.eq.stages.size() == 3);
    }

    SUBCASE("unknown keys are rejected") {
        testsupport::write_file(path, R"({"target_rate": 8000})");
        CHECK_THROWS_AS(load_pipeline_config(path), InvalidConfig);
        testsupport::write_file(path, R"({"gate": {"threshold": 1.0}})");
        CHECK_THROWS_AS(load_pipeline_config(path), InvalidConfig);
        testsupport::write_file(path, R"({"eq": {"stages": [{"kind": "high_pass"}]}})");
        CHECK_THROWS_AS(load_pipeline_config(path), InvalidConfig);
    }

    SUBCASE("missing or malformed files") {
        CHECK_THROWS_AS(load_pipeline_config(dir.file("absent.json")), IoFailure);
        testsupport::write_file(path, "{nope");
        CHECK_THROWS_AS(load_pipeline_config(path), InvalidConfig);
    }
}
