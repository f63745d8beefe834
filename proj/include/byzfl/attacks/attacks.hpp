// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "byzfl/attacks/callbacks.hpp"
#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::attacks {

enum class AttackKind { label_flip, sign_flip, noise, alie, ipm, minmax };

std::string_view to_string(AttackKind kind) noexcept;
AttackKind parse_attack_kind(std::string_view name);
/// Taxonomy level (1 = naive data poisoning ... 5 = fully omniscient).
int default_level(AttackKind kind) noexcept;
std::vector<AttackKind> all_attacks();

enum class Perturbation { neg_unit_mean, neg_std, neg_sign };
std::string_view to_string(Perturbation p) noexcept;
Perturbation parse_perturbation(std::string_view name);

struct AlieParams {
    bool auto_z = false;
    double z_max = 1.0;
    int direction_sign = +1;
};

struct MinMaxParams {
    Perturbation perturbation = Perturbation::neg_std;
    double gamma_init = 10.0;
    double gamma_tol = 1e-5;
};

struct AttackConfig {
    AttackKind kind = AttackKind::noise;
    int level = 2;
    double noise_std = 1.0;
    AlieParams alie;
    double ipm_epsilon = 0.1;
    MinMaxParams minmax;

    static AttackConfig defaults_for(AttackKind kind);
};

// Client-level attacks.

/// L - l - 1. Throws DataError unless 0 <= l < L.
std::int32_t flip_label(std::int32_t label, std::size_t num_classes);
num::ParamVector sign_flip(num::ParamVector const& grad);
/// N(0, sigma^2 I_d).
num::ParamVector noise_update(std::size_t d, double sigma, num::RngStream& rng);

// Omniscient attacks. Each writes the same vector into every malicious row.

/// z used by ALIE: z_max, or Phi^-1((n - s) / n) with s = floor(n/2 + 1) - M.
double alie_z(std::size_t num_clients, std::size_t num_malicious, AlieParams const& params);
/// Coordinate mean and sample std (divisor n - 1) of the rows of `m`.
struct ColumnStats {
    num::ParamVector mean;
    num::ParamVector std;
};
ColumnStats column_stats(num::Matrix const& m);

void alie_updates(AdversaryView& view, AttackConfig const& cfg);
void ipm_updates(AdversaryView& view, AttackConfig const& cfg);

struct MinMaxResult {
    double gamma = 0.0;
    num::ParamVector update;
};
/// Largest gamma (within gamma_tol) such that mean + gamma * p stays within
/// the benign set's diameter of every benign row.
MinMaxResult minmax_search(num::Matrix const& benign, MinMaxParams const& params);
void minmax_updates(AdversaryView& view, AttackConfig const& cfg);

void noise_updates(AdversaryView& view, AttackConfig const& cfg);

/// The callbacks that realise one attack. Either member may be null.
struct AttackPlan {
    std::shared_ptr<ClientCallback const> client;
    std::shared_ptr<AdversaryCallback> adversary;
};

AttackPlan make_attack(AttackConfig const& cfg, std::size_t num_classes);

}  // namespace byzfl::attacks
