// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::num {

struct SingularVector {
    ParamVector v;            ///< unit norm, largest-|component| non-negative
    bool degenerate = false;  ///< zero spectrum; v is e_1
    /// v^T (m^T m) v after each iteration.
    std::vector<double> rayleigh;
};

/// Top right singular vector of `m` by `iters` rounds of power iteration on
/// m^T m, starting from a Gaussian vector drawn from `rng`.
SingularVector top_right_singular_vector(Matrix const& m, std::size_t iters, RngStream& rng);

}  // namespace byzfl::num
