// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "byzfl/models/model.hpp"
#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::data {

struct Dataset {
    num::Matrix features;               ///< N x input_dim
    std::vector<std::int32_t> labels;   ///< contiguous classes 0..L-1
    std::size_t num_classes = 0;
    std::string name;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t input_dim() const noexcept { return features.cols(); }
};

/// L isotropic unit-variance Gaussian blobs, `per_class` samples each, stored
/// class-major (all of class 0, then class 1, ...).
///
/// Class c is centred at s * m * sign * e_(c mod dim) where s = sep / sqrt(2),
/// q = c / dim, sign = (q even ? +1 : -1) and m = q / 2 + 1. For L <= dim all
/// centres are pairwise exactly `sep` apart.
Dataset synth_gaussian_mixture(std::size_t num_classes, std::size_t input_dim, std::size_t per_class, double sep,
                               num::RngStream& rng);

/// Rows of `input_dim` reals followed by one integer label; no header, no
/// quoting. Labels are re-indexed 0..L-1 in order of first appearance.
/// Throws ParseError (with line number) on malformed input or an empty file.
Dataset load_csv(std::filesystem::path const& path);
Dataset parse_csv(std::string const& text, std::string name = "csv");

/// Inverse of load_csv up to label re-indexing; floats are written in
/// shortest round-trip form.
void save_csv(Dataset const& data, std::filesystem::path const& path);
std::string format_csv(Dataset const& data);

/// The listed samples as a batch (copied, in the given order).
models::Batch gather(Dataset const& data, std::span<std::size_t const> indices);
models::Batch as_batch(Dataset const& data);

struct Split {
    Dataset train;
    Dataset test;
};

/// Shuffle and hold out round(test_fraction * N) samples (at least one
/// sample stays on each side when N >= 2).
Split split_holdout(Dataset const& data, double test_fraction, num::RngStream& rng);

}  // namespace byzfl::data
