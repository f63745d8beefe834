// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/numcore/kernels.hpp"

namespace byzfl::num {
namespace {

void axpy_scalar(double a, double const* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = y[i] + a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        x[i] = x[i] * a;
}

void add_scalar(double const* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = y[i] + x[i];
}

void sub_scalar(double const* x, double const* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] - y[i];
}

double dot_scalar(double const* x, double const* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc = acc + x[i] * y[i];
    return acc;
}

double sq_dist_scalar(double const* x, double const* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double const t = x[i] - y[i];
        acc = acc + t * t;
    }
    return acc;
}

constexpr KernelTable kScalar{
    "scalar", axpy_scalar, scale_scalar, add_scalar, sub_scalar, dot_scalar, sq_dist_scalar,
};

}  // namespace

KernelTable const& scalar_kernels() noexcept { return kScalar; }

}  // namespace byzfl::num
