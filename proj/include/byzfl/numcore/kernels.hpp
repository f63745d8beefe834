// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Inner-loop kernels over contiguous double arrays.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at first use from the CPU's capabilities; set BYZFL_SIMD to
// "scalar", "avx2", "neon" or "auto" to override.
//
// Element-wise kernels (axpy, scale, add, sub) are bit-identical across
// variants. Reductions (dot, sq_dist) use lane-split accumulators in the SIMD
// variants, so they agree with the scalar reference only up to rounding, but
// each variant is deterministic on its own.

#include <cstddef>
#include <string_view>
#include <vector>

namespace byzfl::num {

struct KernelTable {
    char const* name;
    /// y[i] += a * x[i]
    void (*axpy)(double a, double const* x, double* y, std::size_t n);
    /// x[i] *= a
    void (*scale)(double a, double* x, std::size_t n);
    /// y[i] += x[i]
    void (*add)(double const* x, double* y, std::size_t n);
    /// out[i] = x[i] - y[i]
    void (*sub)(double const* x, double const* y, double* out, std::size_t n);
    double (*dot)(double const* x, double const* y, std::size_t n);
    /// sum_i (x[i] - y[i])^2
    double (*sq_dist)(double const* x, double const* y, std::size_t n);
};

KernelTable const& scalar_kernels() noexcept;

/// nullptr when the variant is not compiled in or the CPU lacks the ISA.
KernelTable const* avx2_kernels() noexcept;
KernelTable const* neon_kernels() noexcept;

/// Every variant usable on this machine, scalar first.
std::vector<KernelTable const*> available_kernels();

/// The table all library code goes through.
KernelTable const& active_kernels() noexcept;

/// Resolve a BYZFL_SIMD-style request; unknown or unavailable names fall back
/// to the best available variant.
KernelTable const& select_kernels(std::string_view request) noexcept;

}  // namespace byzfl::num
