// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>

#include <spdlog/spdlog.h>

#include "byzfl/numcore/kernels.hpp"

namespace byzfl::num {

std::vector<KernelTable const*> available_kernels() {
    std::vector<KernelTable const*> out{&scalar_kernels()};
    if (auto const* k = avx2_kernels())
        out.push_back(k);
    if (auto const* k = neon_kernels())
        out.push_back(k);
    return out;
}

KernelTable const& select_kernels(std::string_view request) noexcept {
    KernelTable const* best = &scalar_kernels();
    if (auto const* k = avx2_kernels())
        best = k;
    else if (auto const* k = neon_kernels())
        best = k;

    if (request.empty() || request == "auto")
        return *best;
    if (request == "scalar")
        return scalar_kernels();
    if (request == "avx2" && avx2_kernels())
        return *avx2_kernels();
    if (request == "neon" && neon_kernels())
        return *neon_kernels();
    spdlog::warn("BYZFL_SIMD={} is not available here, using {}", request, best->name);
    return *best;
}

KernelTable const& active_kernels() noexcept {
    static KernelTable const& table = [] () -> KernelTable const& {
        char const* env = std::getenv("BYZFL_SIMD");
        return select_kernels(env ? std::string_view(env) : std::string_view());
    }();
    return table;
}

}  // namespace byzfl::num
