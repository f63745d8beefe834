// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace byzfl::num {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1). Acklam's rational
/// approximation followed by one Halley step; |error| ~ 1e-15.
double normal_quantile(double p);

}  // namespace byzfl::num
