#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "medpipe/audio.hpp"
#include "medpipe/augment.hpp"
#include "medpipe/dataset.hpp"
#include "medpipe/equalizer.hpp"
#include "medpipe/errors.hpp"
#include "medpipe/inference.hpp"
#include "medpipe/pipeline.hpp"
#include "medpipe/wav.hpp"
#include "medpipe/wer.hpp"

namespace {

using namespace medpipe;

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out.good()) throw IoFailure("write error on '" + path + "'");
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

struct PreprocessOptions {
    std::string input;
    std::string output;
    std::string config_path;
    bool no_denoise = false;
    bool no_eq = false;
    double noise_ms = kDefaultNoiseMs;
    int target_rate = 16000;
    double clip_threshold = 0.999;
};

struct AugmentOptions {
    std::string input;
    std::string output;
    double snr_db = 0.0;
    double clip_threshold = 1.0;
    std::uint64_t seed = 1;
};

struct ResponseOptions {
    std::string stage;
    int fs = 0;
    double fc = 0.0;
    double q = 0.7071067811865476;
    double gain_db = 3.0;
    int points = 200;
    double f_min = 20.0;
    double f_max = 0.0;
    std::string output;
    std::string prefix = "response-";
};

struct WerOptions {
    std::string pairs_path;
    std::string output;
};

struct ConvertOptions {
    std::string csv_path;
    std::string audio_root;
    std::string out_dir;
    std::string split_column;
    std::string format = "both";
    bool labels = false;
};

struct RunOptions {
    std::string manifest;
    std::string audio_root;
    std::string split_column;
    std::string report_path;
    std::string config_path;
    std::string asr_url;
    std::string asr_mock;
    std::string llm_url;
    std::string llm_mock;
    bool score = false;
    int workers = 0;
    int timeout_ms = 0;
    bool no_denoise = false;
    bool no_eq = false;
    double noise_ms = kDefaultNoiseMs;
    int target_rate = 16000;
    double clip_threshold = 0.999;
};

PipelineConfig build_pipeline_config(const std::string& config_path, const CLI::App& sub,
                                     bool no_denoise, bool no_eq, double noise_ms,
                                     int target_rate, double clip_threshold) {
    PipelineConfig config;
    if (!config_path.empty()) config = load_pipeline_config(config_path);
    if (no_denoise) config.denoise_enabled = false;
    if (no_eq) config.eq.stages.clear();
    if (sub.count("--noise-ms") > 0) config.noise_ms = noise_ms;
    if (sub.count("--target-rate") > 0) config.target_rate_hz = target_rate;
    if (sub.count("--clip-threshold") > 0) config.clip_threshold = clip_threshold;
    return config;
}

void print_timings(const StageTimings& timings) {
    static const char* order[] = {"downmix", "denoise", "equalize", "resample", "asr", "llm"};
    std::cerr << "stage timings (ms):";
    for (const char* name : order) {
        const auto it = timings.find(name);
        if (it == timings.end()) continue;
        std::cerr << ' ' << name << '=' << format_number(it->second);
    }
    std::cerr << '\n';
}

int run_preprocess(const PreprocessOptions& opts, const CLI::App& sub) {
    const PipelineConfig config =
        build_pipeline_config(opts.config_path, sub, opts.no_denoise, opts.no_eq, opts.noise_ms,
                              opts.target_rate, opts.clip_threshold);
    const AudioBuffer input = load_wav(opts.input);
    const PreprocessResult result = preprocess(input, config);
    save_wav(result.audio, opts.output, WavEncoding::float32);
    print_timings(result.timings_ms);
    std::cerr << "peak=" << format_number(result.stats.peak)
              << " rms_dbfs=" << format_number(result.stats.rms_dbfs) << '\n';
    return 0;
}

int run_augment(const AugmentOptions& opts, const CLI::App& sub) {
    const bool add_noise = sub.count("--snr-db") > 0;
    const bool clip = sub.count("--clip-threshold") > 0;
    if (!add_noise && !clip) {
        std::cerr << "augment needs --snr-db and/or --clip-threshold\n";
        return 2;
    }
    AudioBuffer buffer = load_wav(opts.input);
    if (add_noise) buffer = add_white_noise(buffer, opts.snr_db, opts.seed);
    if (clip) buffer = hard_clip(buffer, opts.clip_threshold);
    save_wav(buffer, opts.output, WavEncoding::float32);
    return 0;
}

std::string response_table(const std::vector<double>& freqs,
                           const std::function<std::complex<double>(double)>& response) {
    std::string out = "frequency_hz,magnitude_db,phase_rad\n";
    for (double f : freqs) {
        const std::complex<double> h = response(f);
        out += format_number(f) + "," + format_number(magnitude_db(h)) + "," +
               format_number(std::arg(h)) + "\n";
    }
    return out;
}

std::vector<double> log_grid(double f_min, double f_max, int points,
                             const std::vector<double>& extra, int fs) {
    if (f_min <= 0.0 || f_max <= f_min) throw InvalidConfig("need 0 < f-min < f-max");
    if (points < 2) throw InvalidConfig("need at least 2 grid points");
    std::vector<double> freqs;
    for (int i = 0; i < points; ++i)
        freqs.push_back(f_min * std::pow(f_max / f_min, static_cast<double>(i) / (points - 1)));
    for (double f : extra) {
        if (f > 0.0 && f < fs / 2.0) freqs.push_back(f);
    }
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    return freqs;
}

int run_response(const ResponseOptions& opts, const CLI::App& sub) {
    const double f_max = sub.count("--f-max") > 0 ? opts.f_max : 0.45 * opts.fs;

    const auto stage_spec = [&](FilterKind kind) {
        FilterStageSpec spec;
        spec.kind = kind;
        spec.q = opts.q;
        spec.gain_db = opts.gain_db;
        if (sub.count("--fc") > 0) {
            spec.frequency_hz = opts.fc;
        } else {
            spec.frequency_hz = kind == FilterKind::high_pass  ? 250.0
                                : kind == FilterKind::low_pass ? 11000.0
                                                               : 4000.0;
        }
        return spec;
    };

    if (opts.stage != "all") {
        const FilterStageSpec spec = stage_spec(filter_kind_from_string(opts.stage));
        const BiquadCoefficients coeffs = design_stage(spec, opts.fs);
        const std::vector<double> freqs =
            log_grid(opts.f_min, f_max, opts.points, {spec.frequency_hz}, opts.fs);
        emit(response_table(freqs,
                            [&](double f) { return frequency_response(coeffs, f, opts.fs); }),
             opts.output);
        return 0;
    }

    EqualizerSpec chain = default_equalizer_spec();
    chain.stages[2].gain_db = opts.gain_db;
    std::vector<double> corners;
    for (const FilterStageSpec& stage : chain.stages) corners.push_back(stage.frequency_hz);

    for (const FilterStageSpec& stage : chain.stages) {
        const BiquadCoefficients coeffs = design_stage(stage, opts.fs);
        const std::vector<double> freqs =
            log_grid(opts.f_min, f_max, opts.points, {stage.frequency_hz}, opts.fs);
        write_text(opts.prefix + to_string(stage.kind) + ".csv",
                   response_table(freqs, [&](double f) {
                       return frequency_response(coeffs, f, opts.fs);
                   }));
    }
    const std::vector<double> freqs = log_grid(opts.f_min, f_max, opts.points, corners, opts.fs);
    write_text(opts.prefix + "cascade.csv", response_table(freqs, [&](double f) {
                   return cascade_response(chain, f, opts.fs);
               }));
    return 0;
}

int run_evaluate_wer(const WerOptions& opts) {
    std::ifstream in(opts.pairs_path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + opts.pairs_path + "' for reading");

    std::vector<std::pair<WordSequence, WordSequence>> pairs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw MalformedRow(line_number, "expected <reference>TAB<hypothesis>");
        }
        pairs.emplace_back(normalize_tokens(line.substr(0, tab)),
                           normalize_tokens(line.substr(tab + 1)));
    }

    const WerBreakdown b = corpus_wer(pairs);
    nlohmann::ordered_json j;
    j["wer"] = b.wer;
    j["substitutions"] = b.substitutions;
    j["deletions"] = b.deletions;
    j["insertions"] = b.insertions;
    j["hits"] = b.hits;
    j["reference_length"] = b.reference_length;
    j["pairs"] = pairs.size();
    emit(j.dump(2) + "\n", opts.output);
    return 0;
}

int run_convert(const ConvertOptions& opts) {
    const Manifest manifest = parse_manifest(opts.csv_path, opts.audio_root, opts.split_column);
    std::filesystem::create_directories(opts.out_dir);
    if (opts.format == "asr" || opts.format == "both") {
        write_asr_manifest(manifest.records, opts.audio_root, opts.out_dir);
    }
    if (opts.format == "alpaca" || opts.format == "both") {
        write_alpaca(manifest.records, opts.out_dir);
    }

    nlohmann::ordered_json summary;
    summary["train"] = manifest.summary.train_count;
    summary["test"] = manifest.summary.test_count;
    summary["validate"] = manifest.summary.validate_count;
    summary["total"] = manifest.summary.total;
    if (opts.labels) {
        nlohmann::ordered_json labels = nlohmann::ordered_json::object();
        for (const auto& [label, count] : label_inventory(manifest.records)) labels[label] = count;
        summary["labels"] = labels;
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_pipeline_batch(const RunOptions& opts, const CLI::App& sub) {
    if (opts.asr_url.empty() == opts.asr_mock.empty()) {
        std::cerr << "run-pipeline needs exactly one of --asr-url or --asr-mock\n";
        return 2;
    }
    if (opts.llm_url.empty() == opts.llm_mock.empty()) {
        std::cerr << "run-pipeline needs exactly one of --llm-url or --llm-mock\n";
        return 2;
    }

    PipelineConfig config =
        build_pipeline_config(opts.config_path, sub, opts.no_denoise, opts.no_eq, opts.noise_ms,
                              opts.target_rate, opts.clip_threshold);
    config.asr.endpoint_url = opts.asr_url;
    config.llm.endpoint_url = opts.llm_url;
    if (sub.count("--timeout-ms") > 0) {
        config.asr.timeout_ms = opts.timeout_ms;
        config.llm.timeout_ms = opts.timeout_ms;
    }
    if (const char* token = std::getenv("MEDPIPE_AUTH_TOKEN"); token != nullptr && *token != '\0') {
        config.asr.auth_token = token;
        config.llm.auth_token = token;
    }

    const Manifest manifest = parse_manifest(opts.manifest, opts.audio_root, opts.split_column);

    AsrFactory make_asr;
    if (!opts.asr_mock.empty()) {
        make_asr = [path = opts.asr_mock]() -> std::unique_ptr<AsrBackend> {
            return load_mock_asr(path);
        };
    } else {
        make_asr = [asr = config.asr]() -> std::unique_ptr<AsrBackend> {
            return std::make_unique<HttpAsrBackend>(asr);
        };
    }
    LlmFactory make_llm;
    if (!opts.llm_mock.empty()) {
        make_llm = [path = opts.llm_mock]() -> std::unique_ptr<LlmBackend> {
            return load_mock_llm(path);
        };
    } else {
        make_llm = [llm = config.llm]() -> std::unique_ptr<LlmBackend> {
            return std::make_unique<HttpLlmBackend>(llm);
        };
    }

    BatchOptions batch;
    batch.score = opts.score;
    batch.workers = opts.workers;
    batch.audio_root = opts.audio_root;

    const BatchReport report = run_batch(manifest.records, config, batch, make_asr, make_llm);
    emit(report_to_json(report, batch.score) + "\n", opts.report_path);
    std::cerr << report.records.size() - report.failures << "/" << report.records.size()
              << " records succeeded\n";
    return report.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline tools for the medical speech cleanup and labeling pipeline"};
    app.require_subcommand(1);

    PreprocessOptions pre;
    CLI::App* pre_cmd = app.add_subcommand(
        "preprocess", "Run the audio cleanup chain (downmix, denoise, equalize, resample)");
    pre_cmd->add_option("--input", pre.input, "input wav file")->required();
    pre_cmd->add_option("--output", pre.output, "output wav file (float32)")->required();
    pre_cmd->add_option("--config", pre.config_path, "pipeline config json");
    pre_cmd->add_flag("--no-denoise", pre.no_denoise, "skip the spectral gate");
    pre_cmd->add_flag("--no-eq", pre.no_eq, "skip the equalizer");
    pre_cmd->add_option("--noise-ms", pre.noise_ms, "noise profile length in ms");
    pre_cmd->add_option("--target-rate", pre.target_rate, "output sample rate in Hz");
    pre_cmd->add_option("--clip-threshold", pre.clip_threshold,
                        "|sample| at or above this counts as clipped in the stats");

    AugmentOptions aug;
    CLI::App* aug_cmd =
        app.add_subcommand("augment", "Degrade audio with noise and/or clipping");
    aug_cmd->add_option("--input", aug.input, "input wav file")->required();
    aug_cmd->add_option("--output", aug.output, "output wav file (float32)")->required();
    aug_cmd->add_option("--snr-db", aug.snr_db, "add white noise at this SNR in dB");
    aug_cmd->add_option("--clip-threshold", aug.clip_threshold,
                        "clamp samples to this amplitude, in (0, 1]");
    aug_cmd->add_option("--seed", aug.seed, "noise generator seed");

    ResponseOptions resp;
    CLI::App* resp_cmd = app.add_subcommand(
        "filter-response", "Tabulate filter responses as frequency_hz,magnitude_db,phase_rad csv");
    resp_cmd->add_option("--stage", resp.stage, "high_pass, low_pass, high_shelf or all")
        ->required()
        ->check(CLI::IsMember({"high_pass", "low_pass", "high_shelf", "all"}));
    resp_cmd->add_option("--fs", resp.fs, "sample rate in Hz")->required();
    resp_cmd->add_option("--fc", resp.fc, "corner frequency in Hz (stage default otherwise)");
    resp_cmd->add_option("--q", resp.q, "filter q");
    resp_cmd->add_option("--gain-db", resp.gain_db, "shelf gain in dB");
    resp_cmd->add_option("--points", resp.points, "grid points");
    resp_cmd->add_option("--f-min", resp.f_min, "grid start in Hz");
    resp_cmd->add_option("--f-max", resp.f_max, "grid end in Hz (default 0.45*fs)");
    resp_cmd->add_option("-o,--output", resp.output, "write the single-stage csv here");
    resp_cmd->add_option("--output-prefix", resp.prefix,
                         "file prefix for --stage all (default response-)");

    WerOptions werop;
    CLI::App* wer_cmd = app.add_subcommand(
        "evaluate-wer", "Word error rate of reference/hypothesis pairs (tab-separated lines)");
    wer_cmd->add_option("--pairs", werop.pairs_path, "tsv file: <reference>TAB<hypothesis>")
        ->required();
    wer_cmd->add_option("-o,--output", werop.output, "write the json report here");

    ConvertOptions conv;
    CLI::App* conv_cmd = app.add_subcommand(
        "convert-dataset", "Turn a recording manifest csv into asr/alpaca jsonl files");
    conv_cmd->add_option("--csv", conv.csv_path, "manifest csv")->required();
    conv_cmd->add_option("--audio-root", conv.audio_root,
                         "directory holding the train/test/validate folders")
        ->required();
    conv_cmd->add_option("--out", conv.out_dir, "output directory")->required();
    conv_cmd->add_option("--split-column", conv.split_column,
                         "csv column naming each record's split (otherwise probe directories)");
    conv_cmd->add_option("--format", conv.format, "asr, alpaca or both")
        ->check(CLI::IsMember({"asr", "alpaca", "both"}));
    conv_cmd->add_flag("--labels", conv.labels, "include label counts in the summary");

    RunOptions runop;
    CLI::App* run_cmd = app.add_subcommand(
        "run-pipeline", "Preprocess, transcribe and label every record in a manifest");
    run_cmd->add_option("--manifest", runop.manifest, "manifest csv")->required();
    run_cmd->add_option("--audio-root", runop.audio_root, "directory the audio paths are relative to")
        ->required();
    run_cmd->add_option("--split-column", runop.split_column, "csv column naming the split");
    run_cmd->add_option("--report", runop.report_path, "write the json report here (default stdout)");
    run_cmd->add_flag("--score", runop.score, "score transcripts and labels against the manifest");
    CLI::Option* asr_url_opt =
        run_cmd->add_option("--asr-url", runop.asr_url, "transcription endpoint (http)");
    run_cmd->add_option("--asr-mock", runop.asr_mock, "offline transcription table json")
        ->excludes(asr_url_opt);
    CLI::Option* llm_url_opt =
        run_cmd->add_option("--llm-url", runop.llm_url, "completion endpoint (http)");
    run_cmd->add_option("--llm-mock", runop.llm_mock, "offline completion rules json")
        ->excludes(llm_url_opt);
    run_cmd->add_option("--timeout-ms", runop.timeout_ms, "http timeout in ms for both backends");
    run_cmd->add_option("--workers", runop.workers, "worker threads (0 = hardware concurrency)");
    run_cmd->add_option("--config", runop.config_path, "pipeline config json");
    run_cmd->add_flag("--no-denoise", runop.no_denoise, "skip the spectral gate");
    run_cmd->add_flag("--no-eq", runop.no_eq, "skip the equalizer");
    run_cmd->add_option("--noise-ms", runop.noise_ms, "noise profile length in ms");
    run_cmd->add_option("--target-rate", runop.target_rate, "rate fed to the asr backend in Hz");
    run_cmd->add_option("--clip-threshold", runop.clip_threshold,
                        "|sample| at or above this counts as clipped in the stats");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(pre_cmd)) return run_preprocess(pre, *pre_cmd);
        if (app.got_subcommand(aug_cmd)) return run_augment(aug, *aug_cmd);
        if (app.got_subcommand(resp_cmd)) return run_response(resp, *resp_cmd);
        if (app.got_subcommand(wer_cmd)) return run_evaluate_wer(werop);
        if (app.got_subcommand(conv_cmd)) return run_convert(conv);
        if (app.got_subcommand(run_cmd)) return run_pipeline_batch(runop, *run_cmd);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
