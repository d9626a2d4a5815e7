#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "medpipe/kernels.hpp"

using namespace medpipe;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 31, 64, 257, 1000, 1001};

struct BackendGuard {
    ~BackendGuard() { kernels::reset_backend(); }
};

}  // namespace

TEST_CASE("scalar kernel semantics") {
    BackendGuard guard;
    kernels::force_backend(kernels::Backend::scalar);

    const std::vector<double> x = {1.0, -2.0, 3.0, -4.0};
    CHECK(kernels::sum_squares(x.data(), x.size()) == doctest::Approx(30.0));
    CHECK(kernels::peak_abs(x.data(), x.size()) == 4.0);

    const std::vector<double> y = {1.0, -2.0, 2.0, -4.0};
    CHECK(kernels::sum_squared_diff(x.data(), y.data(), x.size()) == doctest::Approx(1.0));
    CHECK(kernels::dot(x.data(), y.data(), x.size()) == doctest::Approx(1.0 + 4.0 + 6.0 + 16.0));

    // boundary values count as clipped
    const std::vector<double> c = {0.5, -0.999, 0.999, 1.0};
    CHECK(kernels::count_abs_ge(c.data(), c.size(), 0.999) == 3);

    std::vector<double> out(4);
    kernels::clamp(c.data(), out.data(), 4, 0.6);
    CHECK(out == std::vector<double>{0.5, -0.6, 0.6, 0.6});

    kernels::scale(x.data(), out.data(), 4, -0.5);
    CHECK(out == std::vector<double>{-0.5, 1.0, -1.5, 2.0});

    kernels::multiply(x.data(), y.data(), out.data(), 4);
    CHECK(out == std::vector<double>{1.0, 4.0, 6.0, 16.0});

    out = y;
    kernels::axpy(2.0, x.data(), out.data(), 4);
    CHECK(out == std::vector<double>{3.0, -6.0, 8.0, -12.0});

    const std::vector<double> re = {3.0, 0.0};
    const std::vector<double> im = {4.0, -1.0};
    std::vector<double> mag(2);
    kernels::complex_magnitude(re.data(), im.data(), mag.data(), 2);
    CHECK(mag[0] == doctest::Approx(5.0));
    CHECK(mag[1] == doctest::Approx(1.0));

    const std::vector<double> stereo = {0.2, 0.4, 0.6, 0.2};
    std::vector<double> mono(2);
    kernels::downmix_stereo(stereo.data(), mono.data(), 2);
    CHECK(mono[0] == doctest::Approx(0.3));
    CHECK(mono[1] == doctest::Approx(0.4));
}

TEST_CASE("avx2 kernels match the scalar reference") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available on this machine; skipping equivalence checks");
        return;
    }
    BackendGuard guard;
    std::mt19937_64 rng(0xC0FFEE);

    for (std::size_t n : kLengths) {
        CAPTURE(n);
        const std::vector<double> a = random_vector(rng, n);
        const std::vector<double> b = random_vector(rng, n);

        kernels::force_backend(kernels::Backend::scalar);
        const double ss_s = kernels::sum_squares(a.data(), n);
        const double sd_s = kernels::sum_squared_diff(a.data(), b.data(), n);
        const double dot_s = kernels::dot(a.data(), b.data(), n);
        const double peak_s = kernels::peak_abs(a.data(), n);
        const std::size_t count_s = kernels::count_abs_ge(a.data(), n, 0.5);
        std::vector<double> clamp_s(n), scale_s(n), mul_s(n), axpy_s = b, mag_s(n);
        std::vector<double> gre_s = a, gim_s = b;
        kernels::clamp(a.data(), clamp_s.data(), n, 0.25);
        kernels::scale(a.data(), scale_s.data(), n, 1.7);
        kernels::multiply(a.data(), b.data(), mul_s.data(), n);
        kernels::axpy(-0.3, a.data(), axpy_s.data(), n);
        kernels::complex_magnitude(a.data(), b.data(), mag_s.data(), n);
        kernels::apply_gain(gre_s.data(), gim_s.data(), mag_s.data(), n);

        kernels::force_backend(kernels::Backend::avx2);
        CHECK(kernels::sum_squares(a.data(), n) ==
              doctest::Approx(ss_s).epsilon(1e-12).scale(std::max(1.0, ss_s)));
        CHECK(kernels::sum_squared_diff(a.data(), b.data(), n) ==
              doctest::Approx(sd_s).epsilon(1e-12).scale(std::max(1.0, sd_s)));
        CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(dot_s).epsilon(1e-10));
        // max and comparison kernels must agree exactly
        CHECK(kernels::peak_abs(a.data(), n) == peak_s);
        CHECK(kernels::count_abs_ge(a.data(), n, 0.5) == count_s);

        std::vector<double> clamp_v(n), scale_v(n), mul_v(n), axpy_v = b, mag_v(n);
        std::vector<double> gre_v = a, gim_v = b;
        kernels::clamp(a.data(), clamp_v.data(), n, 0.25);
        kernels::scale(a.data(), scale_v.data(), n, 1.7);
        kernels::multiply(a.data(), b.data(), mul_v.data(), n);
        kernels::axpy(-0.3, a.data(), axpy_v.data(), n);
        kernels::complex_magnitude(a.data(), b.data(), mag_v.data(), n);
        kernels::apply_gain(gre_v.data(), gim_v.data(), mag_v.data(), n);

        // elementwise kernels are bit-identical across backends
        CHECK(clamp_v == clamp_s);
        CHECK(scale_v == scale_s);
        CHECK(mul_v == mul_s);
        CHECK(axpy_v == axpy_s);
        CHECK(mag_v == mag_s);
        CHECK(gre_v == gre_s);
        CHECK(gim_v == gim_s);
    }
}

TEST_CASE("stereo downmix equivalence across backends") {
    if (!kernels::avx2_available()) return;
    BackendGuard guard;
    std::mt19937_64 rng(42);
    for (std::size_t frames : kLengths) {
        const std::vector<double> interleaved = random_vector(rng, frames * 2);
        std::vector<double> mono_s(frames), mono_v(frames);
        kernels::force_backend(kernels::Backend::scalar);
        kernels::downmix_stereo(interleaved.data(), mono_s.data(), frames);
        kernels::force_backend(kernels::Backend::avx2);
        kernels::downmix_stereo(interleaved.data(), mono_v.data(), frames);
        CHECK(mono_v == mono_s);
    }
}

TEST_CASE("backend selection") {
    BackendGuard guard;
    kernels::force_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    kernels::reset_backend();
    const bool simd_disabled = std::getenv("MEDPIPE_NO_SIMD") != nullptr;
    if (kernels::avx2_available() && !simd_disabled) {
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
    } else {
        CHECK(kernels::active_backend() == kernels::Backend::scalar);
    }
    CHECK(std::string(kernels::backend_name(kernels::Backend::scalar)) == "scalar");
    CHECK(std::string(kernels::backend_name(kernels::Backend::avx2)) == "avx2");
}
