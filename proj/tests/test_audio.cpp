#include <doctest.h>

#include <cmath>
#include <limits>

#include "medpipe/audio.hpp"
#include "medpipe/errors.hpp"
#include "support.hpp"

using namespace medpipe;
using testsupport::make_tone;

TEST_CASE("buffer invariants are enforced at construction") {
    CHECK_THROWS_AS(AudioBuffer({0.0, std::nan("")}, 16000, 1), InvalidBuffer);
    CHECK_THROWS_AS(AudioBuffer({0.0, std::numeric_limits<double>::infinity()}, 16000, 1),
                    InvalidBuffer);
    CHECK_THROWS_AS(AudioBuffer({0.0, 0.0, 0.0}, 16000, 2), InvalidBuffer);
    CHECK_THROWS_AS(AudioBuffer({0.0, 0.0}, 7999, 1), InvalidBuffer);
    CHECK_THROWS_AS(AudioBuffer({0.0, 0.0}, 16000, 0), InvalidBuffer);

    const AudioBuffer ok({0.1, -0.2, 0.3, -0.4}, 44100, 2);
    CHECK(ok.frames() == 2);
    CHECK(ok.duration_ms() == doctest::Approx(2000.0 / 44100.0));
}

TEST_CASE("downmix averages channels") {
    const AudioBuffer one_frame({1.0, -1.0}, 16000, 2);
    CHECK(downmix_mono(one_frame).samples() == std::vector<double>{0.0});

    const AudioBuffer two_frames({0.2, 0.4, 0.6, 0.2}, 16000, 2);
    const AudioBuffer mono = downmix_mono(two_frames);
    CHECK(mono.channels() == 1);
    CHECK(mono.sample_rate_hz() == 16000);
    REQUIRE(mono.samples().size() == 2);
    CHECK(mono.samples()[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mono.samples()[1] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("downmix of mono input is an identical copy") {
    const AudioBuffer tone = make_tone(440.0, 16000, 0.05, 0.7);
    const AudioBuffer out = downmix_mono(tone);
    CHECK(out.samples() == tone.samples());
    CHECK(out.sample_rate_hz() == tone.sample_rate_hz());
}

TEST_CASE("downmix handles more than two channels") {
    const AudioBuffer three({0.3, 0.6, 0.9, -0.3, 0.0, 0.3}, 16000, 3);
    const AudioBuffer mono = downmix_mono(three);
    REQUIRE(mono.samples().size() == 2);
    CHECK(mono.samples()[0] == doctest::Approx(0.6));
    CHECK(mono.samples()[1] == doctest::Approx(0.0));
}

TEST_CASE("signal stats of a sine") {
    // full number of periods, so RMS is exactly amplitude / sqrt(2)
    const AudioBuffer tone = make_tone(440.0, 16000, 1.0, 0.5);
    const SignalStats stats = signal_stats(tone);
    CHECK(stats.rms == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(stats.rms_dbfs == doctest::Approx(20.0 * std::log10(0.5 / std::sqrt(2.0))).epsilon(1e-9));
    CHECK(stats.peak <= 0.5);
    CHECK(stats.peak > 0.499);
    CHECK(stats.clipped_fraction == 0.0);
}

TEST_CASE("clipped fraction matches the arcsine distribution") {
    const AudioBuffer tone = make_tone(440.0, 16000, 1.0, 1.0);
    const SignalStats stats = signal_stats(tone, 0.707);
    // fraction of time |sin| >= t is 1 - (2/pi) asin(t)
    const double expected = 1.0 - 2.0 / M_PI * std::asin(0.707);
    CHECK(stats.clipped_fraction == doctest::Approx(expected).epsilon(0.01));
    CHECK(stats.peak == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("signal stats edge cases") {
    CHECK_THROWS_AS(signal_stats(AudioBuffer{}), EmptyBuffer);
    const AudioBuffer silence(std::vector<double>(100, 0.0), 16000, 1);
    const SignalStats stats = signal_stats(silence);
    CHECK(stats.rms == 0.0);
    CHECK(stats.peak == 0.0);
    CHECK(std::isinf(stats.rms_dbfs));
    CHECK(stats.rms_dbfs < 0.0);

    CHECK_THROWS_AS(signal_stats(silence, 0.0), OutOfRange);
    CHECK_THROWS_AS(signal_stats(silence, -0.5), OutOfRange);
    CHECK_THROWS_AS(signal_stats(silence, 1.0001), OutOfRange);
    CHECK_NOTHROW(signal_stats(silence, 1.0));
}

TEST_CASE("full-scale square wave sits at 0 dBFS") {
    std::vector<double> square(200);
    for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 == 0 ? 1.0 : -1.0;
    const SignalStats stats = signal_stats(AudioBuffer(std::move(square), 16000, 1));
    CHECK(stats.rms == doctest::Approx(1.0));
    CHECK(stats.rms_dbfs == doctest::Approx(0.0));
    CHECK(stats.clipped_fraction == doctest::Approx(1.0));
}
