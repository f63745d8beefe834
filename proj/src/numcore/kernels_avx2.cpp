// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 variants. Only the functions below are compiled for AVX2 (via the
// target attribute), so nothing else in the binary picks up VEX encodings.
// FMA is deliberately not enabled: mul followed by add keeps the element-wise
// kernels bit-identical to the scalar reference.

#include "byzfl/numcore/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define BYZFL_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define BYZFL_HAVE_AVX2_KERNELS 0
#endif

namespace byzfl::num {

#if BYZFL_HAVE_AVX2_KERNELS
namespace {

#define BYZFL_AVX2 __attribute__((target("avx2")))

BYZFL_AVX2 void axpy_avx2(double a, double const* x, double* y, std::size_t n) {
    __m256d const va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d const vx = _mm256_loadu_pd(x + i);
        __m256d const vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i)
        y[i] = y[i] + a * x[i];
}

BYZFL_AVX2 void scale_avx2(double a, double* x, std::size_t n) {
    __m256d const va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    for (; i < n; ++i)
        x[i] = x[i] * a;
}

BYZFL_AVX2 void add_avx2(double const* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        y[i] = y[i] + x[i];
}

BYZFL_AVX2 void sub_avx2(double const* x, double const* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        out[i] = x[i] - y[i];
}

// Fixed-order horizontal reduction: (l0 + l1) + (l2 + l3).
BYZFL_AVX2 inline double hsum(__m256d v) {
    __m128d const lo = _mm256_castpd256_pd128(v);
    __m128d const hi = _mm256_extractf128_pd(v, 1);
    double const l0 = _mm_cvtsd_f64(lo);
    double const l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    double const l2 = _mm_cvtsd_f64(hi);
    double const l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
    return (l0 + l1) + (l2 + l3);
}

BYZFL_AVX2 double dot_avx2(double const* x, double const* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc = acc + x[i] * y[i];
    return acc;
}

BYZFL_AVX2 double sq_dist_avx2(double const* x, double const* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d const t0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        __m256d const t1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(t0, t0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(t1, t1));
    }
    if (i + 4 <= n) {
        __m256d const t0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(t0, t0));
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        double const t = x[i] - y[i];
        acc = acc + t * t;
    }
    return acc;
}

#undef BYZFL_AVX2

constexpr KernelTable kAvx2{
    "avx2", axpy_avx2, scale_avx2, add_avx2, sub_avx2, dot_avx2, sq_dist_avx2,
};

}  // namespace

KernelTable const* avx2_kernels() noexcept {
    static bool const supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

#else

KernelTable const* avx2_kernels() noexcept { return nullptr; }

#endif

}  // namespace byzfl::num
