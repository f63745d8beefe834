// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Client-side update transforms, applied before upload: norm clipping, then
// Gaussian noise calibrated for (epsilon, delta) differential privacy.

#include <cstddef>
#include <optional>

#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::agg {

struct DpConfig {
    double epsilon = 1.0;
    double delta = 1e-5;
    double g_max = 1.0;
    std::size_t batch_b = 1;
};

struct TransformConfig {
    std::optional<double> clip_tau;
    std::optional<DpConfig> dp;

    bool empty() const noexcept { return !clip_tau && !dp; }
};

/// ConfigError on any domain violation, including dp without clip_tau or
/// with clip_tau > g_max.
void validate(TransformConfig const& cfg);

/// delta * min(1, tau / ||delta||). The result never has norm above tau.
num::ParamVector clip_update(num::ParamVector const& delta, double tau);

/// 2 g_max sqrt(2 ln(1.25 / delta)) / (b epsilon)
double dp_sigma(DpConfig const& dp);
num::ParamVector dp_noise(num::ParamVector const& delta, DpConfig const& dp, num::RngStream& rng);

/// Clip (if set) then DP noise (if set).
num::ParamVector apply_transforms(num::ParamVector const& delta, TransformConfig const& cfg, num::RngStream& rng);

}  // namespace byzfl::agg
