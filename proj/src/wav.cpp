#include "medpipe/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"

namespace medpipe {

namespace {

std::uint16_t rd_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t rd_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void wr_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void wr_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void wr_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) {
    return std::memcmp(p, tag, 4) == 0;
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
        throw MalformedHeader("not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint16_t format_tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
    std::size_t data_off = 0;
    std::size_t data_size = 0;
    bool have_data = false;

    // Walk the chunk list. The RIFF size field is untrustworthy in the wild,
    // so the actual file size bounds the walk.
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* hdr = bytes.data() + pos;
        const std::size_t csize = rd_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + csize > bytes.size()) {
            throw MalformedHeader("truncated chunk");
        }
        if (tag_is(hdr, "fmt ")) {
            if (csize < 16) {
                throw MalformedHeader("fmt chunk too small");
            }
            format_tag = rd_u16(&bytes[body]);
            channels = rd_u16(&bytes[body + 2]);
            sample_rate = rd_u32(&bytes[body + 4]);
            bits_per_sample = rd_u16(&bytes[body + 14]);
            if (format_tag == kFormatExtensible) {
                // effective format is the first word of the subformat GUID
                if (csize < 40) {
                    throw MalformedHeader("extensible fmt chunk too small");
                }
                format_tag = rd_u16(&bytes[body + 24]);
            }
            have_fmt = true;
        } else if (tag_is(hdr, "data")) {
            data_off = body;
            data_size = csize;
            have_data = true;
        }
        pos = body + csize + (csize & 1);
    }

    if (!have_fmt) {
        throw MalformedHeader("missing fmt chunk");
    }
    if (!have_data) {
        throw MalformedHeader("missing data chunk");
    }
    if (channels < 1 || channels > 2) {
        throw UnsupportedEncoding("only mono and stereo are supported, got " +
                                  std::to_string(channels) + " channels");
    }
    const bool pcm16 = format_tag == kFormatPcm && bits_per_sample == 16;
    const bool f32 = format_tag == kFormatFloat && bits_per_sample == 32;
    if (!pcm16 && !f32) {
        throw UnsupportedEncoding("format tag " + std::to_string(format_tag) + " at " +
                                  std::to_string(bits_per_sample) + " bits is not supported");
    }
    if (sample_rate < 8000) {
        throw UnsupportedEncoding("sample rates below 8000 Hz are not supported");
    }
    const std::size_t bytes_per_sample = bits_per_sample / 8;
    if (data_size % (bytes_per_sample * channels) != 0) {
        throw MalformedHeader("data chunk size is not a whole number of frames");
    }

    const std::size_t count = data_size / bytes_per_sample;
    std::vector<double> samples(count);
    const std::uint8_t* p = bytes.data() + data_off;
    if (pcm16) {
        for (std::size_t i = 0; i < count; ++i) {
            const auto raw = static_cast<std::int16_t>(rd_u16(p + 2 * i));
            samples[i] = static_cast<double>(raw) / 32768.0;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint32_t raw = rd_u32(p + 4 * i);
            float f;
            std::memcpy(&f, &raw, sizeof f);
            if (!std::isfinite(f)) {
                throw MalformedHeader("non-finite sample at index " + std::to_string(i));
            }
            samples[i] = static_cast<double>(f);
        }
    }
    return AudioBuffer(std::move(samples), static_cast<int>(sample_rate), channels);
}

AudioBuffer load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoFailure("read error on '" + path + "'");
    }
    return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavEncoding encoding) {
    if (buffer.channels() > 2) {
        throw UnsupportedEncoding("wav output supports mono and stereo only");
    }
    const auto& x = buffer.samples();
    if (encoding == WavEncoding::pcm16 && kernels::peak_abs(x.data(), x.size()) > 1.0) {
        throw OutOfRange("pcm16 output requires samples in [-1, 1]; clip or scale first");
    }

    const auto channels = static_cast<std::uint16_t>(buffer.channels());
    const auto rate = static_cast<std::uint32_t>(buffer.sample_rate_hz());
    const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
    const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
    const auto data_size = static_cast<std::uint32_t>(x.size() * bits / 8);
    const bool is_float = encoding == WavEncoding::float32;
    // pcm16 gets the classic 16-byte fmt chunk; float32 carries cbSize plus a
    // fact chunk, as the format spec asks of non-PCM payloads
    const std::uint32_t fmt_size = is_float ? 18 : 16;
    const std::uint32_t fact_bytes = is_float ? 12 : 0;
    const std::uint32_t riff_size = 4 + (8 + fmt_size) + fact_bytes + (8 + data_size);

    std::vector<std::uint8_t> out;
    out.reserve(12 + 8 + fmt_size + fact_bytes + 8 + data_size);
    wr_tag(out, "RIFF");
    wr_u32(out, riff_size);
    wr_tag(out, "WAVE");
    wr_tag(out, "fmt ");
    wr_u32(out, fmt_size);
    wr_u16(out, is_float ? kFormatFloat : kFormatPcm);
    wr_u16(out, channels);
    wr_u32(out, rate);
    wr_u32(out, rate * block);
    wr_u16(out, block);
    wr_u16(out, bits);
    if (is_float) {
        wr_u16(out, 0);  // cbSize
        wr_tag(out, "fact");
        wr_u32(out, 4);
        wr_u32(out, static_cast<std::uint32_t>(buffer.frames()));
    }
    wr_tag(out, "data");
    wr_u32(out, data_size);

    if (encoding == WavEncoding::pcm16) {
        for (double v : x) {
            long q = std::llround(v * 32768.0);
            if (q > 32767) q = 32767;
            if (q < -32768) q = -32768;
            wr_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
        }
    } else {
        for (double v : x) {
            const auto f = static_cast<float>(v);
            std::uint32_t raw;
            std::memcpy(&raw, &f, sizeof raw);
            wr_u32(out, raw);
        }
    }
    return out;
}

void save_wav(const AudioBuffer& buffer, const std::string& path, WavEncoding encoding) {
    const std::vector<std::uint8_t> bytes = encode_wav(buffer, encoding);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out.good()) {
        throw IoFailure("write error on '" + path + "'");
    }
}

}  // namespace medpipe
