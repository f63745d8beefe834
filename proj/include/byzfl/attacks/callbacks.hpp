// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Two-tier callback pipeline.
//
// Client callbacks run inside each malicious client's local training, on
// whatever worker thread that client is scheduled on; they only see the
// client's own batch and gradient. Adversary callbacks run once per round on
// the driver thread, between local training and aggregation, with read-only
// access to the benign updates and write access to the malicious rows.

#include <cstddef>
#include <span>
#include <vector>

#include "byzfl/models/model.hpp"
#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::attacks {

class ClientCallback {
public:
    virtual ~ClientCallback() = default;
    /// May rewrite the batch (features or labels) before the forward pass.
    virtual void on_batch_begin(models::Batch& /*batch*/) const {}
    /// May rewrite the gradient before the optimizer step.
    virtual void on_backward_end(std::span<double> /*grad*/) const {}
};

/// Adversary's window onto one round's update set. Benign rows are only
/// reachable through const spans.
class AdversaryView {
public:
    /// `rng` seeds any randomness the adversary needs this round.
    AdversaryView(num::UpdateSet& updates, std::size_t round, num::RngStream rng);

    std::size_t num_clients() const noexcept { return updates_.size(); }
    std::size_t num_benign() const noexcept { return benign_.size(); }
    std::size_t num_malicious() const noexcept { return malicious_.size(); }
    std::size_t dim() const noexcept { return updates_.dim(); }
    std::size_t round() const noexcept { return round_; }

    std::span<double const> benign(std::size_t j) const noexcept { return updates_.row(benign_[j]); }
    std::span<double> malicious(std::size_t j) noexcept { return updates_.row(malicious_[j]); }
    std::size_t malicious_client_id(std::size_t j) const noexcept { return updates_.client_id(malicious_[j]); }

    /// Copy of the benign rows, in client-id order.
    num::Matrix benign_matrix() const;
    /// Overwrite every malicious row with `value`.
    void fill_malicious(std::span<double const> value);

    num::RngStream& rng() noexcept { return rng_; }

private:
    num::UpdateSet& updates_;
    std::vector<std::size_t> benign_;
    std::vector<std::size_t> malicious_;
    std::size_t round_;
    num::RngStream rng_;
};

struct AlgorithmContext {
    std::size_t num_clients = 0;
    std::size_t num_malicious = 0;
    std::size_t num_classes = 0;
    std::size_t dim = 0;
};

class AdversaryCallback {
public:
    virtual ~AdversaryCallback() = default;
    virtual void on_algorithm_begin(AlgorithmContext const& /*ctx*/) {}
    virtual void on_local_round_end(AdversaryView& /*view*/) {}
};

}  // namespace byzfl::attacks
