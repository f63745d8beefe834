// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment files, grid expansion, trial scheduling and the scaling bench.
//
// An experiment is a JSON object; any value may be replaced by
// {"grid_search": [option, ...]}, and options may themselves contain grids.
// Expansion walks keys depth-first in file order, so the first grid varies
// slowest and repetitions vary fastest.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "byzfl/protocol/protocol.hpp"

namespace byzfl::harness {

using json = nlohmann::ordered_json;

struct ExperimentConfig {
    json raw;
};

/// ParseError/ConfigError on malformed input.
ExperimentConfig parse_experiment(std::string const& text);
ExperimentConfig load_experiment(std::filesystem::path const& path);

/// Every grid-free variant of `value`, in expansion order.
std::vector<json> expand_value(json const& value);

struct Trial {
    std::size_t trial_id = 0;
    std::size_t repetition = 0;
    /// Fully resolved experiment (no grids), repetitions removed.
    json config;
    protocol::TrialSpec spec;
};

/// Expands and validates. ConfigError messages start with the field path.
std::vector<Trial> expand_grid(ExperimentConfig const& cfg, std::optional<std::uint64_t> seed_override = {});

/// Resolve one grid-free experiment object into a trial spec (seed and
/// stream root are set from `seed`, `trial_id` and `repetition`).
protocol::TrialSpec resolve_trial(json const& resolved, std::size_t trial_id, std::size_t repetition);

/// CSV with header round,train_loss,test_acc,elapsed_s and shortest
/// round-trip floats.
std::string format_records_csv(std::vector<protocol::RoundRecord> const& records);

struct ExperimentOptions {
    std::filesystem::path out_dir = "results";
    /// Concurrent trials.
    std::size_t parallelism = 1;
    /// Client-phase worker threads per trial; 0 means resolve_threads(0).
    std::size_t threads = 0;
    bool record_timing = true;
    std::optional<std::uint64_t> seed_override;
};

struct ManifestEntry {
    std::size_t trial_id = 0;
    std::size_t repetition = 0;
    json config;
    std::string csv_path;
    /// ok, diverged or failed.
    std::string status;
    double total_s = 0.0;
    std::size_t partition_repairs = 0;
    std::size_t divergent_rounds = 0;
    std::string error;
};

json manifest_json(std::vector<ManifestEntry> const& entries);

/// Runs every trial, writes trial_NNNN.csv files and manifest.json into
/// out_dir, and returns the manifest in trial order.
std::vector<ManifestEntry> run_experiment(ExperimentConfig const& cfg, ExperimentOptions const& options);

struct ScalingRow {
    std::size_t num_clients = 0;
    double avg_s = 0.0;
    double std_s = 0.0;
};

struct ParallelRow {
    std::size_t threads = 0;
    double avg_s = 0.0;
    double std_s = 0.0;
    double speedup = 1.0;
};

struct ScalingReport {
    std::vector<ScalingRow> by_clients;
    std::vector<ParallelRow> by_threads;
    std::size_t fixed_clients = 0;
};

/// The fixed synthetic task timed by bench_scaling.
protocol::TrialSpec default_bench_spec();

/// Per-round wall time for each client count (ascending), then for the last
/// client count at each thread level. One warm-up round is not timed.
ScalingReport bench_scaling(protocol::TrialSpec const& base, std::vector<std::size_t> const& client_counts,
                            std::size_t rounds, std::vector<std::size_t> const& thread_levels = {1, 2, 4});

std::string format_scaling_csv(ScalingReport const& report);

}  // namespace byzfl::harness
