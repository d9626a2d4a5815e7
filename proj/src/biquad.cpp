#include "medpipe/biquad.hpp"

#include <cmath>
#include <string>

#include "medpipe/errors.hpp"

namespace medpipe {

namespace {

void check_design_args(int sample_rate_hz, double frequency_hz, double q) {
    const double nyquist = static_cast<double>(sample_rate_hz) / 2.0;
    if (!(frequency_hz > 0.0) || !(frequency_hz < nyquist)) {
        throw FrequencyOutOfRange("corner frequency " + std::to_string(frequency_hz) +
                                  " Hz must lie in (0, " + std::to_string(nyquist) + ") at " +
                                  std::to_string(sample_rate_hz) + " Hz");
    }
    if (!(q > 0.0)) {
        throw InvalidConfig("q must be positive, got " + std::to_string(q));
    }
}

struct Angles {
    double cw;
    double sw;
    double alpha;
};

Angles angles_for(int sample_rate_hz, double frequency_hz, double q) {
    const double w0 = 2.0 * M_PI * frequency_hz / static_cast<double>(sample_rate_hz);
    return {std::cos(w0), std::sin(w0), std::sin(w0) / (2.0 * q)};
}

}  // namespace

BiquadCoefficients design_high_pass(int sample_rate_hz, double frequency_hz, double q) {
    check_design_args(sample_rate_hz, frequency_hz, q);
    const auto [cw, sw, alpha] = angles_for(sample_rate_hz, frequency_hz, q);
    const double a0 = 1.0 + alpha;
    return {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0,
            (-2.0 * cw) / a0, (1.0 - alpha) / a0};
}

BiquadCoefficients design_low_pass(int sample_rate_hz, double frequency_hz, double q) {
    check_design_args(sample_rate_hz, frequency_hz, q);
    const auto [cw, sw, alpha] = angles_for(sample_rate_hz, frequency_hz, q);
    const double a0 = 1.0 + alpha;
    return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0,
            (-2.0 * cw) / a0, (1.0 - alpha) / a0};
}

BiquadCoefficients design_high_shelf(int sample_rate_hz, double frequency_hz, double gain_db,
                                     double q) {
    check_design_args(sample_rate_hz, frequency_hz, q);
    const auto [cw, sw, alpha] = angles_for(sample_rate_hz, frequency_hz, q);
    const double A = std::pow(10.0, gain_db / 40.0);
    const double two_root_a_alpha = 2.0 * std::sqrt(A) * alpha;
    const double a0 = (A + 1.0) - (A - 1.0) * cw + two_root_a_alpha;
    return {A * ((A + 1.0) + (A - 1.0) * cw + two_root_a_alpha) / a0,
            -2.0 * A * ((A - 1.0) + (A + 1.0) * cw) / a0,
            A * ((A + 1.0) + (A - 1.0) * cw - two_root_a_alpha) / a0,
            2.0 * ((A - 1.0) - (A + 1.0) * cw) / a0,
            ((A + 1.0) - (A - 1.0) * cw - two_root_a_alpha) / a0};
}

bool is_stable(const BiquadCoefficients& c) {
    return std::fabs(c.a2) < 1.0 && std::fabs(c.a1) < 1.0 + c.a2;
}

AudioBuffer apply_biquad(const AudioBuffer& buffer, const BiquadCoefficients& c) {
    const auto& x = buffer.samples();
    const auto ch = static_cast<std::size_t>(buffer.channels());
    std::vector<double> y(x.size());
    for (std::size_t cidx = 0; cidx < ch; ++cidx) {
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t i = cidx; i < x.size(); i += ch) {
            const double in = x[i];
            const double out = c.b0 * in + s1;
            s1 = c.b1 * in - c.a1 * out + s2;
            s2 = c.b2 * in - c.a2 * out;
            y[i] = out;
        }
    }
    return AudioBuffer(std::move(y), buffer.sample_rate_hz(), buffer.channels());
}

std::complex<double> frequency_response(const BiquadCoefficients& c, double frequency_hz,
                                        int sample_rate_hz) {
    const double nyquist = static_cast<double>(sample_rate_hz) / 2.0;
    if (!(frequency_hz > 0.0) || !(frequency_hz < nyquist)) {
        throw FrequencyOutOfRange("response frequency " + std::to_string(frequency_hz) +
                                  " Hz must lie in (0, " + std::to_string(nyquist) + ")");
    }
    const double w = 2.0 * M_PI * frequency_hz / static_cast<double>(sample_rate_hz);
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    return (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
}

double magnitude_db(const std::complex<double>& response) {
    return 20.0 * std::log10(std::abs(response));
}

}  // namespace medpipe
