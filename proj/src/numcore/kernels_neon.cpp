// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

// NEON variants (aarch64, where Advanced SIMD is baseline). vfmaq is avoided
// for the same reason FMA is avoided on x86: element-wise ops stay
// bit-identical to the scalar reference.

#include "byzfl/numcore/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>

namespace byzfl::num {
namespace {

void axpy_neon(double a, double const* x, double* y, std::size_t n) {
    float64x2_t const va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i)
        y[i] = y[i] + a * x[i];
}

void scale_neon(double a, double* x, std::size_t n) {
    float64x2_t const va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
    for (; i < n; ++i)
        x[i] = x[i] * a;
}

void add_neon(double const* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
    for (; i < n; ++i)
        y[i] = y[i] + x[i];
}

void sub_neon(double const* x, double const* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i)
        out[i] = x[i] - y[i];
}

double dot_neon(double const* x, double const* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    float64x2_t const acc2 = vaddq_f64(acc0, acc1);
    double acc = vgetq_lane_f64(acc2, 0) + vgetq_lane_f64(acc2, 1);
    for (; i < n; ++i)
        acc = acc + x[i] * y[i];
    return acc;
}

double sq_dist_neon(double const* x, double const* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t const t0 = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
        float64x2_t const t1 = vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
        acc0 = vaddq_f64(acc0, vmulq_f64(t0, t0));
        acc1 = vaddq_f64(acc1, vmulq_f64(t1, t1));
    }
    float64x2_t const acc2 = vaddq_f64(acc0, acc1);
    double acc = vgetq_lane_f64(acc2, 0) + vgetq_lane_f64(acc2, 1);
    for (; i < n; ++i) {
        double const t = x[i] - y[i];
        acc = acc + t * t;
    }
    return acc;
}

constexpr KernelTable kNeon{
    "neon", axpy_neon, scale_neon, add_neon, sub_neon, dot_neon, sq_dist_neon,
};

}  // namespace

KernelTable const* neon_kernels() noexcept { return &kNeon; }

}  // namespace byzfl::num

#else

namespace byzfl::num {
KernelTable const* neon_kernels() noexcept { return nullptr; }
}  // namespace byzfl::num

#endif
