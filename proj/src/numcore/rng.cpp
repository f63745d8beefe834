// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/numcore/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "byzfl/error.hpp"

namespace byzfl::num {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

struct Block {
    std::uint32_t w[4];
};

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Block philox4x32_10(std::uint64_t counter, std::uint64_t nonce, std::uint64_t key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(nonce);
    std::uint32_t c3 = static_cast<std::uint32_t>(nonce >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint64_t const p0 = std::uint64_t{kMul0} * c0;
        std::uint64_t const p1 = std::uint64_t{kMul1} * c2;
        std::uint32_t const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        std::uint32_t const lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        std::uint32_t const lo1 = static_cast<std::uint32_t>(p1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {{c0, c1, c2, c3}};
}

}  // namespace

RngStream RngStream::root(std::uint64_t seed) {
    return RngStream(seed, splitmix64(seed), splitmix64(seed ^ 0xA0761D6478BD642Full), {});
}

RngStream RngStream::derive(std::string_view label) const {
    std::uint64_t const h = fnv1a64(label);
    std::uint64_t const key = splitmix64(key_ ^ splitmix64(h));
    std::uint64_t const nonce = splitmix64(nonce_ + splitmix64(h ^ 0xE7037ED1A0B428DBull));
    std::vector<std::string> path = path_;
    path.emplace_back(label);
    return RngStream(seed_, key, nonce, std::move(path));
}

RngStream RngStream::derive(std::string_view label, std::uint64_t index) const {
    std::string full(label);
    full += ':';
    full += std::to_string(index);
    return derive(full);
}

void RngStream::refill() {
    Block const b = philox4x32_10(counter_++, nonce_, key_);
    block_[0] = (std::uint64_t{b.w[1]} << 32) | b.w[0];
    block_[1] = (std::uint64_t{b.w[3]} << 32) | b.w[2];
    buffered_ = 2;
}

std::uint64_t RngStream::next_u64() {
    if (buffered_ == 0)
        refill();
    return block_[2 - buffered_--];
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0)
        throw ParameterError("uniform_index: n must be positive");
    // Rejection on the top of the range keeps the draw unbiased.
    std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double const u1 = 1.0 - uniform();  // (0, 1]
    double const u2 = uniform();
    double const r = std::sqrt(-2.0 * std::log(u1));
    double const theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    has_spare_normal_ = true;
    return r * std::cos(theta);
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0))
        throw ParameterError("gamma: shape must be positive");
    if (shape < 1.0) {
        double const u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double const d = shape - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double const u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

ParamVector gaussian(RngStream& rng, double mean, double std, std::size_t d) {
    if (!(std >= 0.0))
        throw ParameterError("gaussian: std must be non-negative");
    ParamVector out(d, mean);
    if (std == 0.0)
        return out;
    for (double& v : out)
        v = mean + std * rng.normal();
    return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng) {
    if (k > n)
        throw ParameterError("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t const j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace byzfl::num
