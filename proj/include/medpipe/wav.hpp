#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medpipe/audio.hpp"

namespace medpipe {

enum class WavEncoding { pcm16, float32 };

// Reads a RIFF/WAVE file. Accepts PCM16 and IEEE float32 payloads, 1 or 2
// channels, plain or WAVE_FORMAT_EXTENSIBLE headers. Anything else raises
// UnsupportedEncoding; structural damage raises MalformedHeader; unreadable
// files raise IoFailure. PCM16 samples are scaled by 1/32768.
AudioBuffer load_wav(const std::string& path);

// Writes the buffer. For pcm16 every sample must be inside [-1, 1], otherwise
// OutOfRange; values are quantized as clamp(round(x * 32768), -32768, 32767).
// float32 narrows each sample to float.
void save_wav(const AudioBuffer& buffer, const std::string& path,
              WavEncoding encoding = WavEncoding::pcm16);

// In-memory variants of the above (same validation rules).
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavEncoding encoding);
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

}  // namespace medpipe
