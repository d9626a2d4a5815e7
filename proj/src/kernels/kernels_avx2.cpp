// AVX2 variants. This translation unit is compiled with -mavx2 -mfma
// -ffp-contract=off: FMA is used only where written explicitly (the
// reductions), never injected by the compiler, so the elementwise kernels and
// the tail loops round exactly like the scalar reference.

#ifdef MEDPIPE_HAVE_AVX2

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace medpipe::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

}  // namespace

double avx2_sum_squares(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double avx2_sum_squared_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double avx2_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double avx2_peak_abs(const double* x, std::size_t n) {
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        best = _mm256_max_pd(best, abs_pd(_mm256_loadu_pd(x + i)));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, best);
    double peak = lanes[0];
    for (int k = 1; k < 4; ++k) {
        if (lanes[k] > peak) peak = lanes[k];
    }
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > peak) peak = v;
    }
    return peak;
}

std::size_t avx2_count_abs_ge(const double* x, std::size_t n, double threshold) {
    const __m256d thr = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(abs_pd(_mm256_loadu_pd(x + i)), thr, _CMP_GE_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(mask)));
    }
    for (; i < n; ++i) {
        if (std::fabs(x[i]) >= threshold) ++count;
    }
    return count;
}

void avx2_clamp(const double* x, double* out, std::size_t n, double limit) {
    const __m256d hi = _mm256_set1_pd(limit);
    const __m256d lo = _mm256_set1_pd(-limit);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), lo), hi);
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) {
        double v = x[i];
        if (v > limit) v = limit;
        if (v < -limit) v = -limit;
        out[i] = v;
    }
}

void avx2_scale(const double* x, double* out, std::size_t n, double k) {
    const __m256d vk = _mm256_set1_pd(k);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vk));
    }
    for (; i < n; ++i) out[i] = x[i] * k;
}

void avx2_multiply(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void avx2_axpy(double a, const double* x, double* y, std::size_t n) {
    // mul then add, not fmadd: must round exactly like the scalar kernel
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void avx2_complex_magnitude(const double* re, const double* im, double* mag, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(re + i);
        const __m256d m = _mm256_loadu_pd(im + i);
        const __m256d sq = _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(m, m));
        _mm256_storeu_pd(mag + i, _mm256_sqrt_pd(sq));
    }
    for (; i < n; ++i) mag[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
}

void avx2_apply_gain(double* re, double* im, const double* gain, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(gain + i);
        _mm256_storeu_pd(re + i, _mm256_mul_pd(_mm256_loadu_pd(re + i), g));
        _mm256_storeu_pd(im + i, _mm256_mul_pd(_mm256_loadu_pd(im + i), g));
    }
    for (; i < n; ++i) {
        re[i] = re[i] * gain[i];
        im[i] = im[i] * gain[i];
    }
}

void avx2_downmix_stereo(const double* interleaved, double* mono, std::size_t frames) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= frames; i += 4) {
        const __m256d a = _mm256_loadu_pd(interleaved + 2 * i);      // L0 R0 L1 R1
        const __m256d b = _mm256_loadu_pd(interleaved + 2 * i + 4);  // L2 R2 L3 R3
        const __m256d left = _mm256_unpacklo_pd(a, b);               // L0 L2 L1 L3
        const __m256d right = _mm256_unpackhi_pd(a, b);              // R0 R2 R1 R3
        __m256d sum = _mm256_add_pd(left, right);
        sum = _mm256_permute4x64_pd(sum, _MM_SHUFFLE(3, 1, 2, 0));   // back to 0 1 2 3
        _mm256_storeu_pd(mono + i, _mm256_mul_pd(sum, half));
    }
    for (; i < frames; ++i) {
        mono[i] = (interleaved[2 * i] + interleaved[2 * i + 1]) * 0.5;
    }
}

}  // namespace medpipe::kernels::detail

#endif  // MEDPIPE_HAVE_AVX2
