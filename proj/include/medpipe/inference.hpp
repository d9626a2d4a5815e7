#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medpipe/audio.hpp"
#include "medpipe/wer.hpp"

namespace medpipe {

// Prompt skeleton sent to the language model: the instruction block followed
// by "### Input:\n{}\n\n### Response:\n", where {} receives the transcript.
// Rendering it with a transcript reproduces the fine-tuning text byte for byte
// up to and including the response marker line.
const std::string& default_prompt_template();

struct AsrBackendConfig {
    std::string endpoint_url;
    int timeout_ms = 10000;
    std::string audio_encoding = "wav_pcm16";  // only supported value
    std::string auth_token;                    // empty = unauthenticated
};

struct LlmBackendConfig {
    std::string endpoint_url;
    int timeout_ms = 10000;
    std::string prompt_template = default_prompt_template();
    std::string auth_token;
};

struct Label {
    std::string value;         // parsed label, single line, trimmed
    std::string raw_response;  // full completion it was parsed from
};

struct Transcription {
    WordSequence words;   // normalized tokens, for scoring
    std::string raw_text;  // verbatim backend output
};

class AsrBackend {
  public:
    virtual ~AsrBackend() = default;
    virtual std::string transcribe_raw(const AudioBuffer& audio) = 0;
};

class LlmBackend {
  public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// POST {"audio": <base64 wav>} -> {"text": "..."}. The wire encoding is pcm16
// wav; samples are clamped to full scale first (post-EQ audio can overshoot
// slightly). http:// endpoints only. Maps failures to Timeout,
// TransportFailure or BackendError(status, body).
class HttpAsrBackend : public AsrBackend {
  public:
    explicit HttpAsrBackend(AsrBackendConfig config);
    std::string transcribe_raw(const AudioBuffer& audio) override;

  private:
    AsrBackendConfig config_;
};

// POST {"prompt": "..."} -> {"completion": "..."}.
class HttpLlmBackend : public LlmBackend {
  public:
    explicit HttpLlmBackend(LlmBackendConfig config);
    std::string complete(const std::string& prompt) override;

  private:
    LlmBackendConfig config_;
};

// 16 hex digits of FNV-1a over the sample rate, channel count and raw sample
// bytes. Used to key mock transcription tables.
std::string fingerprint(const AudioBuffer& audio);

// Offline stand-in keyed by audio fingerprint. Without a fallback an unknown
// fingerprint raises UnknownFingerprint (strict mode); with one, it returns
// the fallback text instead.
class MockAsrBackend : public AsrBackend {
  public:
    MockAsrBackend(std::map<std::string, std::string> table,
                   std::optional<std::string> fallback = std::nullopt);
    std::string transcribe_raw(const AudioBuffer& audio) override;

  private:
    std::map<std::string, std::string> table_;
    std::optional<std::string> fallback_;
};

// Offline completion stand-in: the first rule whose `contains` text appears in
// the prompt (case-insensitive) supplies the label. echo_prompt mimics a model
// that repeats the prompt before answering, which exercises the response
// marker parsing. No match and no fallback yields an empty completion, which
// classify() reports as UnparseableResponse.
class MockLlmBackend : public LlmBackend {
  public:
    struct Rule {
        std::string contains;
        std::string label;
    };

    MockLlmBackend(std::vector<Rule> rules, std::optional<std::string> fallback = std::nullopt,
                   bool echo_prompt = false);
    std::string complete(const std::string& prompt) override;

  private:
    std::vector<Rule> rules_;
    std::optional<std::string> fallback_;
    bool echo_prompt_;
};

// JSON mock descriptions, used by the CLI:
//   asr: {"table": {"<fingerprint>": "text", ...}, "fallback": "text"?}
//   llm: {"rules": [{"contains": "...", "label": "..."}], "fallback": "..."?,
//         "echo": bool?}
std::unique_ptr<MockAsrBackend> load_mock_asr(const std::string& path);
std::unique_ptr<MockLlmBackend> load_mock_llm(const std::string& path);

// Runs the backend and normalizes. An empty (or whitespace-only) backend
// result raises EmptyTranscription.
Transcription transcribe(AsrBackend& backend, const AudioBuffer& audio);

// Substitutes the transcript into the template's first {} slot, runs the
// backend and parses the label: the first line after the last
// "### Response:" marker, or the first nonempty line when the completion
// carries no marker. An empty parse raises UnparseableResponse.
Label classify(LlmBackend& backend, const std::string& prompt_template,
               const std::string& transcript);

std::string render_prompt(const std::string& prompt_template, const std::string& transcript);
std::string parse_label_response(const std::string& completion);

}  // namespace medpipe
