#include "medpipe/inference.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "detail/base64.hpp"
#include "medpipe/dataset.hpp"
#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"
#include "medpipe/wav.hpp"

namespace medpipe {

const std::string& default_prompt_template() {
    static const std::string tmpl = kInstruction +
        "\n"
        "\n"
        "### Instruction:\n" +
        kInstruction +
        "\n"
        "\n"
        "### Input:\n"
        "{}\n"
        "\n"
        "### Response:\n";
    return tmpl;
}

namespace {

struct ParsedUrl {
    std::string host;
    int port;
    std::string path;
};

ParsedUrl parse_http_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        if (url.rfind("https://", 0) == 0) {
            throw TransportFailure("https endpoints are not supported; use http");
        }
        throw TransportFailure("endpoint url must start with http://, got '" + url + "'");
    }
    const std::size_t host_begin = scheme.size();
    const std::size_t path_begin = url.find('/', host_begin);
    std::string authority = url.substr(host_begin, path_begin == std::string::npos
                                                       ? std::string::npos
                                                       : path_begin - host_begin);
    ParsedUrl out;
    out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    const std::size_t colon = authority.rfind(':');
    if (colon == std::string::npos) {
        out.host = authority;
        out.port = 80;
    } else {
        out.host = authority.substr(0, colon);
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw TransportFailure("bad port in endpoint url '" + url + "'");
        }
    }
    if (out.host.empty()) {
        throw TransportFailure("endpoint url has no host: '" + url + "'");
    }
    return out;
}

std::string post_json(const std::string& url, int timeout_ms, const std::string& auth_token,
                      const std::string& payload) {
    const ParsedUrl parsed = parse_http_url(url);
    httplib::Client client(parsed.host, parsed.port);
    const time_t sec = timeout_ms / 1000;
    const time_t usec = static_cast<time_t>(timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    if (!auth_token.empty()) {
        client.set_default_headers({{"Authorization", "Bearer " + auth_token}});
    }

    const auto started = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(parsed.path, payload, "application/json");
    if (!res) {
        const auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - started)
                                    .count();
        // httplib reports a timed-out read as a generic read error, so use the
        // clock to tell a slow backend from an unreachable one
        if (res.error() == httplib::Error::ConnectionTimeout ||
            elapsed_ms >= static_cast<long long>(timeout_ms) * 9 / 10) {
            throw Timeout("no response from " + url + " within " + std::to_string(timeout_ms) +
                          " ms");
        }
        throw TransportFailure("request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError(res->status, res->body);
    }
    return res->body;
}

std::string extract_string_field(const std::string& body, const char* field,
                                 const std::string& url) {
    nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains(field) ||
        !parsed[field].is_string()) {
        throw TransportFailure("response from " + url + " lacks a string '" +
                               std::string(field) + "' field");
    }
    return parsed[field].get<std::string>();
}

std::string trim_copy(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower_copy(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

HttpAsrBackend::HttpAsrBackend(AsrBackendConfig config) : config_(std::move(config)) {
    if (config_.audio_encoding != "wav_pcm16") {
        throw UnsupportedEncoding("audio_encoding '" + config_.audio_encoding +
                                  "' is not supported (only wav_pcm16)");
    }
    if (config_.timeout_ms <= 0) {
        throw InvalidConfig("timeout_ms must be positive");
    }
}

std::string HttpAsrBackend::transcribe_raw(const AudioBuffer& audio) {
    // full-scale clamp: the +3 dB shelf can push peaks slightly past 1.0 and
    // the strict save_wav contract would reject the buffer
    std::vector<double> clipped(audio.samples().size());
    kernels::clamp(audio.samples().data(), clipped.data(), clipped.size(), 1.0);
    const AudioBuffer wire(std::move(clipped), audio.sample_rate_hz(), audio.channels());
    const std::vector<std::uint8_t> wav = encode_wav(wire, WavEncoding::pcm16);

    nlohmann::json req;
    req["audio"] = detail::base64_encode(wav);
    const std::string body =
        post_json(config_.endpoint_url, config_.timeout_ms, config_.auth_token, req.dump());
    return extract_string_field(body, "text", config_.endpoint_url);
}

HttpLlmBackend::HttpLlmBackend(LlmBackendConfig config) : config_(std::move(config)) {
    if (config_.timeout_ms <= 0) {
        throw InvalidConfig("timeout_ms must be positive");
    }
}

std::string HttpLlmBackend::complete(const std::string& prompt) {
    nlohmann::json req;
    req["prompt"] = prompt;
    const std::string body =
        post_json(config_.endpoint_url, config_.timeout_ms, config_.auth_token, req.dump());
    return extract_string_field(body, "completion", config_.endpoint_url);
}

std::string fingerprint(const AudioBuffer& audio) {
    std::uint64_t hash = 14695981039346656037ULL;
    auto mix = [&hash](const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            hash ^= p[i];
            hash *= 1099511628211ULL;
        }
    };
    const auto rate = static_cast<std::int32_t>(audio.sample_rate_hz());
    const auto channels = static_cast<std::int32_t>(audio.channels());
    mix(&rate, sizeof rate);
    mix(&channels, sizeof channels);
    for (double v : audio.samples()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        std::uint8_t le[8];
        for (int k = 0; k < 8; ++k) le[k] = static_cast<std::uint8_t>((bits >> (8 * k)) & 0xFF);
        mix(le, sizeof le);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

MockAsrBackend::MockAsrBackend(std::map<std::string, std::string> table,
                               std::optional<std::string> fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {}

std::string MockAsrBackend::transcribe_raw(const AudioBuffer& audio) {
    const std::string fp = fingerprint(audio);
    const auto it = table_.find(fp);
    if (it != table_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw UnknownFingerprint("no transcription for audio fingerprint " + fp);
}

MockLlmBackend::MockLlmBackend(std::vector<Rule> rules, std::optional<std::string> fallback,
                               bool echo_prompt)
    : rules_(std::move(rules)), fallback_(std::move(fallback)), echo_prompt_(echo_prompt) {}

std::string MockLlmBackend::complete(const std::string& prompt) {
    const std::string haystack = lower_copy(prompt);
    std::string label;
    bool matched = false;
    for (const Rule& rule : rules_) {
        if (haystack.find(lower_copy(rule.contains)) != std::string::npos) {
            label = rule.label;
            matched = true;
            break;
        }
    }
    if (!matched) {
        if (!fallback_) return "";
        label = *fallback_;
    }
    return echo_prompt_ ? prompt + label : label;
}

std::unique_ptr<MockAsrBackend> load_mock_asr(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open mock description '" + path + "'");
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InvalidConfig("mock description '" + path + "' is not a JSON object");
    }
    std::map<std::string, std::string> table;
    if (j.contains("table")) {
        for (const auto& [key, value] : j["table"].items()) {
            if (!value.is_string()) {
                throw InvalidConfig("mock table values must be strings");
            }
            table[key] = value.get<std::string>();
        }
    }
    std::optional<std::string> fallback;
    if (j.contains("fallback") && !j["fallback"].is_null()) {
        fallback = j["fallback"].get<std::string>();
    }
    return std::make_unique<MockAsrBackend>(std::move(table), std::move(fallback));
}

std::unique_ptr<MockLlmBackend> load_mock_llm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open mock description '" + path + "'");
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InvalidConfig("mock description '" + path + "' is not a JSON object");
    }
    std::vector<MockLlmBackend::Rule> rules;
    if (j.contains("rules")) {
        for (const auto& entry : j["rules"]) {
            if (!entry.is_object() || !entry.contains("contains") || !entry.contains("label")) {
                throw InvalidConfig("each mock rule needs 'contains' and 'label'");
            }
            rules.push_back({entry["contains"].get<std::string>(),
                             entry["label"].get<std::string>()});
        }
    }
    std::optional<std::string> fallback;
    if (j.contains("fallback") && !j["fallback"].is_null()) {
        fallback = j["fallback"].get<std::string>();
    }
    const bool echo = j.value("echo", false);
    return std::make_unique<MockLlmBackend>(std::move(rules), std::move(fallback), echo);
}

Transcription transcribe(AsrBackend& backend, const AudioBuffer& audio) {
    const std::string raw = backend.transcribe_raw(audio);
    if (trim_copy(raw).empty()) {
        throw EmptyTranscription("backend produced an empty transcription");
    }
    return {normalize_tokens(raw), raw};
}

std::string render_prompt(const std::string& prompt_template, const std::string& transcript) {
    const std::size_t slot = prompt_template.find("{}");
    if (slot == std::string::npos) {
        throw InvalidConfig("prompt_template must contain a {} slot for the transcript");
    }
    std::string out;
    out.reserve(prompt_template.size() + transcript.size());
    out.append(prompt_template, 0, slot);
    out.append(transcript);
    out.append(prompt_template, slot + 2, std::string::npos);
    return out;
}

std::string parse_label_response(const std::string& completion) {
    static const std::string marker = "### Response:";
    std::string tail;
    const std::size_t pos = completion.rfind(marker);
    if (pos != std::string::npos) {
        tail = completion.substr(pos + marker.size());
    } else {
        tail = completion;
    }
    // first nonempty line of the tail
    std::size_t begin = 0;
    while (begin < tail.size()) {
        std::size_t end = tail.find('\n', begin);
        if (end == std::string::npos) end = tail.size();
        const std::string line = trim_copy(tail.substr(begin, end - begin));
        if (!line.empty()) return line;
        begin = end + 1;
    }
    return "";
}

Label classify(LlmBackend& backend, const std::string& prompt_template,
               const std::string& transcript) {
    if (trim_copy(transcript).empty()) {
        throw EmptyTranscription("classify needs a nonempty transcript");
    }
    const std::string prompt = render_prompt(prompt_template, transcript);
    const std::string completion = backend.complete(prompt);
    const std::string value = parse_label_response(completion);
    if (value.empty()) {
        throw UnparseableResponse("no label found in completion: '" +
                                  (completion.size() > 120 ? completion.substr(0, 120) + "..."
                                                           : completion) +
                                  "'");
    }
    return {value, completion};
}

}  // namespace medpipe
