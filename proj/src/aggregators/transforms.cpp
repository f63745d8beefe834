// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/aggregators/transforms.hpp"

#include <cmath>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"

namespace byzfl::agg {

void validate(TransformConfig const& cfg) {
    if (cfg.clip_tau && !(*cfg.clip_tau > 0.0))
        throw ConfigError("transforms.clip_tau: must be positive");
    if (!cfg.dp)
        return;
    auto const& dp = *cfg.dp;
    if (!(dp.epsilon > 0.0))
        throw ConfigError("transforms.dp.epsilon: must be positive");
    if (!(dp.delta > 0.0 && dp.delta < 1.0))
        throw ConfigError("transforms.dp.delta: must be in (0, 1)");
    if (!(dp.g_max > 0.0))
        throw ConfigError("transforms.dp.g_max: must be positive");
    if (dp.batch_b == 0)
        throw ConfigError("transforms.dp.batch_b: must be at least 1");
    if (!cfg.clip_tau)
        throw ConfigError("transforms.dp: requires clip_tau");
    if (*cfg.clip_tau > dp.g_max)
        throw ConfigError("transforms.dp: clip_tau must not exceed g_max");
}

num::ParamVector clip_update(num::ParamVector const& delta, double tau) {
    if (!(tau > 0.0))
        throw ParameterError("clip_update: tau must be positive");
    double const norm = num::l2_norm(delta);
    if (norm <= tau)
        return delta;
    auto const& k = num::active_kernels();
    double scale = tau / norm;
    num::ParamVector out = delta;
    k.scale(scale, out.data(), out.size());
    // Rounding can leave the norm a few ulps above tau.
    while (num::l2_norm(out) > tau) {
        scale = std::nextafter(scale, 0.0);
        out = delta;
        k.scale(scale, out.data(), out.size());
    }
    return out;
}

double dp_sigma(DpConfig const& dp) {
    if (!(dp.epsilon > 0.0) || !(dp.delta > 0.0 && dp.delta < 1.0))
        throw ConfigError("dp: need epsilon > 0 and delta in (0, 1)");
    return 2.0 * dp.g_max * std::sqrt(2.0 * std::log(1.25 / dp.delta)) /
           (static_cast<double>(dp.batch_b) * dp.epsilon);
}

num::ParamVector dp_noise(num::ParamVector const& delta, DpConfig const& dp, num::RngStream& rng) {
    double const s = dp_sigma(dp);
    auto out = num::gaussian(rng, 0.0, s, delta.size());
    num::active_kernels().add(delta.data(), out.data(), out.size());
    return out;
}

num::ParamVector apply_transforms(num::ParamVector const& delta, TransformConfig const& cfg, num::RngStream& rng) {
    num::ParamVector out = cfg.clip_tau ? clip_update(delta, *cfg.clip_tau) : delta;
    if (cfg.dp)
        out = dp_noise(out, *cfg.dp, rng);
    return out;
}

}  // namespace byzfl::agg
