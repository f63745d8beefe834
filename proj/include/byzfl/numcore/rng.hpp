// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "byzfl/numcore/tensor.hpp"

namespace byzfl::num {

/// Keyed, counter-based random stream (Philox4x32-10).
///
/// A stream is identified by a root seed and a path of labels; its key is a
/// hash of both, so the same path always reproduces the same draws no matter
/// in which order or on which thread streams are created. Streams are value
/// types: drawing advances only the local copy.
class RngStream {
public:
    static RngStream root(std::uint64_t seed);

    RngStream derive(std::string_view label) const;
    /// Same as derive(label + ":" + index).
    RngStream derive(std::string_view label, std::uint64_t index) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal (Box-Muller, platform independent).
    double normal();
    /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    std::uint64_t root_seed() const noexcept { return seed_; }
    std::vector<std::string> const& path() const noexcept { return path_; }
    /// Internal key material; distinct paths give distinct keys.
    std::array<std::uint64_t, 2> key() const noexcept { return {key_, nonce_}; }

    friend bool operator==(RngStream const& a, RngStream const& b) noexcept {
        return a.key_ == b.key_ && a.nonce_ == b.nonce_ && a.counter_ == b.counter_ &&
               a.buffered_ == b.buffered_;
    }

private:
    RngStream(std::uint64_t seed, std::uint64_t key, std::uint64_t nonce, std::vector<std::string> path)
        : seed_(seed), key_(key), nonce_(nonce), path_(std::move(path)) {}

    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t nonce_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> block_{};
    unsigned buffered_ = 0;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
    std::vector<std::string> path_;
};

/// d independent N(mean, std^2) draws. std < 0 is a ParameterError.
ParamVector gaussian(RngStream& rng, double mean, double std, std::size_t d);

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t const j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// k distinct indices from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng);

}  // namespace byzfl::num
