#pragma once

#include <complex>

#include "medpipe/audio.hpp"

namespace medpipe {

// Second-order IIR section, normalized so a0 == 1:
//   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoefficients {
    double b0;
    double b1;
    double b2;
    double a1;
    double a2;
};

// Designs follow the familiar audio cookbook formulas with
// alpha = sin(w0) / (2 q) and, for the shelf, A = 10^(gain_db/40).
// Every design requires 0 < frequency_hz < sample_rate_hz/2
// (FrequencyOutOfRange otherwise) and q > 0 (InvalidConfig otherwise).
BiquadCoefficients design_high_pass(int sample_rate_hz, double frequency_hz, double q);
BiquadCoefficients design_low_pass(int sample_rate_hz, double frequency_hz, double q);
BiquadCoefficients design_high_shelf(int sample_rate_hz, double frequency_hz, double gain_db,
                                     double q);

// Both poles inside the unit circle: |a2| < 1 and |a1| < 1 + a2.
bool is_stable(const BiquadCoefficients& c);

// Transposed direct-form II, state initialized to zero, one independent state
// per channel. Identity coefficients (b0=1, rest 0) return the input bit for
// bit.
AudioBuffer apply_biquad(const AudioBuffer& buffer, const BiquadCoefficients& c);

// H(e^{jw}) at the given frequency. Requires 0 < frequency_hz <
// sample_rate_hz/2.
std::complex<double> frequency_response(const BiquadCoefficients& c, double frequency_hz,
                                        int sample_rate_hz);

double magnitude_db(const std::complex<double>& response);

}  // namespace medpipe
