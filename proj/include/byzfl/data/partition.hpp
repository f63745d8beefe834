// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "byzfl/data/dataset.hpp"
#include "byzfl/numcore/rng.hpp"

namespace byzfl::data {

enum class PartitionScheme { iid, dirichlet };

struct Partition {
    /// One ascending index list per client; lists are disjoint and non-empty.
    std::vector<std::vector<std::size_t>> assignments;
    PartitionScheme scheme = PartitionScheme::iid;
    double alpha = 0.0;           ///< dirichlet only
    std::size_t repairs = 0;      ///< samples moved to fill empty clients

    std::size_t num_clients() const noexcept { return assignments.size(); }
};

/// Random permutation cut into K contiguous pieces; the first N mod K clients
/// get one extra sample. Every index is assigned.
Partition partition_iid(Dataset const& data, std::size_t num_clients, num::RngStream& rng);

/// Per class l: p_l ~ Dir_K(alpha), counts by largest-remainder rounding of
/// p_l * n_l (ties to the lower client index), the class's shuffled samples
/// dealt out in client order. Empty clients are then filled, lowest id
/// first, by moving the last sample of the currently largest client (ties to
/// the lower index). Every index is assigned.
Partition partition_dirichlet(Dataset const& data, std::size_t num_clients, double alpha, num::RngStream& rng);

/// Draw from Dir_K(alpha) by normalized Gamma(alpha) variates.
std::vector<double> sample_dirichlet(std::size_t k, double alpha, num::RngStream& rng);

}  // namespace byzfl::data
