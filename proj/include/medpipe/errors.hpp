#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medpipe {

// Base class for every error this library raises on purpose. Catch this to
// distinguish "the input was bad" from a genuine bug (std::logic_error etc).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- audio / wav ----------------------------------------------------------

struct InvalidBuffer : Error {
    using Error::Error;
};
struct MalformedHeader : Error {
    using Error::Error;
};
struct UnsupportedEncoding : Error {
    using Error::Error;
};
struct IoFailure : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};
struct EmptyBuffer : Error {
    using Error::Error;
};
struct UnsupportedRate : Error {
    using Error::Error;
};

// ---- filters ---------------------------------------------------------------

struct FrequencyOutOfRange : Error {
    using Error::Error;
};

// ---- denoiser --------------------------------------------------------------

struct BufferTooShort : Error {
    using Error::Error;
};
struct RateMismatch : Error {
    using Error::Error;
};
struct InvalidConfig : Error {
    using Error::Error;
};

// ---- augmentation ----------------------------------------------------------

struct SilentSignal : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};

// ---- scoring ---------------------------------------------------------------

struct EmptyReference : Error {
    using Error::Error;
};
struct EmptyCorpus : Error {
    using Error::Error;
};

// ---- dataset ---------------------------------------------------------------

struct MissingColumn : Error {
    using Error::Error;
};
struct MalformedRow : Error {
    MalformedRow(std::size_t line_number, const std::string& what)
        : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
    std::size_t line;
};
struct DuplicateId : Error {
    using Error::Error;
};

// ---- inference -------------------------------------------------------------

struct Timeout : Error {
    using Error::Error;
};
struct TransportFailure : Error {
    using Error::Error;
};
struct BackendError : Error {
    BackendError(int http_status, std::string response_body)
        : Error("backend returned status " + std::to_string(http_status)),
          status(http_status),
          body(std::move(response_body)) {}
    int status;
    std::string body;
};
struct EmptyTranscription : Error {
    using Error::Error;
};
struct UnparseableResponse : Error {
    using Error::Error;
};
struct UnknownFingerprint : Error {
    using Error::Error;
};

// ---- pipeline --------------------------------------------------------------

struct StageFailure : Error {
    StageFailure(std::string stage_name, const std::string& what)
        : Error("stage '" + stage_name + "' failed: " + what), stage(std::move(stage_name)) {}
    std::string stage;
};

}  // namespace medpipe
