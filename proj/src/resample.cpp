#include <cmath>
#include <string>
#include <vector>

#include "medpipe/audio.hpp"
#include "medpipe/errors.hpp"
#include "medpipe/kernels.hpp"

namespace medpipe {

namespace {

constexpr int kTaps = 32;
constexpr int kHalf = kTaps / 2;  // filter center sits between taps 15 and 16
constexpr int kBranches = 512;
constexpr double kKaiserBeta = 8.6;
// Keep the passband a little inside Nyquist so the 32-tap kernel has room to
// roll off before the fold frequency.
constexpr double kCutoffScale = 0.945;

// I0(x), the zeroth-order modified Bessel function, by its power series.
double bessel_i0(double x) {
    double sum = 1.0;
    double term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

// Polyphase bank: row f holds the 32 taps for fractional offset f/kBranches.
// One extra row (fraction 1.0) backs the linear interpolation of the last
// branch. Rows are normalized to unit sum so DC passes at exactly 0 dB on
// every branch.
std::vector<double> build_bank(double cutoff) {
    std::vector<double> bank(static_cast<std::size_t>(kBranches + 1) * kTaps);
    const double i0_beta = bessel_i0(kKaiserBeta);
    for (int f = 0; f <= kBranches; ++f) {
        const double frac = static_cast<double>(f) / kBranches;
        double* row = &bank[static_cast<std::size_t>(f) * kTaps];
        double sum = 0.0;
        for (int k = 0; k < kTaps; ++k) {
            const double u = static_cast<double>(k - (kHalf - 1)) - frac;
            const double window_arg = u / kHalf;
            double w = 0.0;
            if (std::fabs(window_arg) <= 1.0) {
                w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - window_arg * window_arg)) / i0_beta;
            }
            row[k] = 2.0 * cutoff * sinc(2.0 * cutoff * u) * w;
            sum += row[k];
        }
        for (int k = 0; k < kTaps; ++k) row[k] /= sum;
    }
    return bank;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buffer, int target_rate_hz) {
    if (buffer.channels() != 1) {
        throw InvalidBuffer("resample expects a mono buffer; downmix first");
    }
    if (target_rate_hz < 8000) {
        throw UnsupportedRate("target rate must be at least 8000 Hz, got " +
                              std::to_string(target_rate_hz));
    }
    if (target_rate_hz == buffer.sample_rate_hz()) {
        return buffer;
    }

    const auto& x = buffer.samples();
    const std::size_t in_len = x.size();
    const double ratio = static_cast<double>(target_rate_hz) / buffer.sample_rate_hz();
    const auto out_len =
        static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * ratio));
    if (in_len == 0 || out_len == 0) {
        return AudioBuffer(std::vector<double>(out_len, 0.0), target_rate_hz, 1);
    }

    const double cutoff = 0.5 * std::min(1.0, ratio) * kCutoffScale;
    const std::vector<double> bank = build_bank(cutoff);

    // Zero padding turns the edge handling into plain dot products: tap
    // offsets span [-16, +16] around the source position.
    std::vector<double> padded(in_len + kHalf + kHalf + 1, 0.0);
    for (std::size_t i = 0; i < in_len; ++i) padded[i + kHalf] = x[i];

    std::vector<double> out(out_len);
    for (std::size_t n = 0; n < out_len; ++n) {
        const double pos = static_cast<double>(n) / ratio;
        const auto base = static_cast<std::size_t>(pos);  // pos >= 0
        const double frac = pos - static_cast<double>(base);
        const double scaled = frac * kBranches;
        const auto branch = static_cast<std::size_t>(scaled);
        const double blend = scaled - static_cast<double>(branch);

        // padded index of tap k: base + k - (kHalf-1) + kHalf = base + k + 1
        const double* src = padded.data() + base + 1;
        const double* row0 = &bank[branch * kTaps];
        const double* row1 = row0 + kTaps;
        const double a = kernels::dot(src, row0, kTaps);
        const double b = kernels::dot(src, row1, kTaps);
        out[n] = a + (b - a) * blend;
    }
    return AudioBuffer(std::move(out), target_rate_hz, 1);
}

}  // namespace medpipe
