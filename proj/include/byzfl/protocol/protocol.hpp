// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// FedAvg-family training loop with full participation.
//
// Each round: broadcast w, every client runs E_l local steps in parallel,
// client transforms are applied, the adversary rewrites the malicious rows,
// the aggregator reduces the update set and the server optimizer steps on the
// pseudo-gradient -Delta.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "byzfl/aggregators/aggregators.hpp"
#include "byzfl/aggregators/transforms.hpp"
#include "byzfl/attacks/attacks.hpp"
#include "byzfl/data/dataset.hpp"
#include "byzfl/data/partition.hpp"
#include "byzfl/models/model.hpp"
#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::protocol {

enum class RunTag { fedsgd, fedavg };
std::string_view to_string(RunTag tag) noexcept;
RunTag parse_run_tag(std::string_view name);

struct ClientOptConfig {
    double lr = 1.0;
    std::size_t local_steps = 1;
    double momentum = 0.0;
    std::size_t batch_size = 32;
    std::optional<double> grad_clip;
    /// Zero the client momentum buffer at the start of every round.
    bool reset_momentum = false;

    void validate() const;
};

/// Piecewise-constant (round, lr) steps; the first entry is at round 0.
struct LrSchedule {
    std::vector<std::pair<std::size_t, double>> steps{{0, 1.0}};

    double at(std::size_t round) const;
    void validate() const;
};

struct ServerOptConfig {
    LrSchedule lr_schedule;
    double momentum = 0.0;

    void validate() const;
};

enum class DatasetKind { synthetic, csv };
enum class DivergencePolicy { continue_clamped, abort };
/// Which benign rows the adversary sees: before or after client transforms.
enum class AdversaryTiming { post_transform, pre_transform };

struct DataConfig {
    DatasetKind dataset = DatasetKind::synthetic;
    std::size_t num_classes = 2;
    std::size_t input_dim = 2;
    std::size_t samples_per_class = 500;
    double separation = 6.0;
    std::filesystem::path csv_path;
    data::PartitionScheme partition = data::PartitionScheme::iid;
    double alpha = 1.0;
    double test_fraction = 0.2;
};

/// Everything one trial needs, already resolved to scalars.
struct TrialSpec {
    RunTag run = RunTag::fedsgd;
    std::size_t rounds = 100;
    models::ModelSpec model;
    DataConfig data;
    std::size_t num_clients = 10;
    std::size_t num_malicious = 0;
    ClientOptConfig client;
    ServerOptConfig server;
    agg::AggregatorConfig aggregator;
    agg::TransformConfig transforms;
    std::optional<attacks::AttackConfig> attack;
    std::size_t eval_interval = 10;
    DivergencePolicy divergence = DivergencePolicy::continue_clamped;
    AdversaryTiming adversary_view = AdversaryTiming::post_transform;
    std::uint64_t seed = 0;
    /// Root of every random stream of the trial. Unset means root(seed).
    std::optional<num::RngStream> root;

    /// Applies the FedSGD preset (one local step at unit rate).
    void apply_preset();
    /// ConfigError with a field path on the first problem found.
    void validate() const;
    num::RngStream root_stream() const;
};

struct RunOptions {
    /// Worker threads for the client phase; 0 means BYZFL_THREADS or all cores.
    std::size_t threads = 0;
    /// Measure per-round wall time; when false elapsed_s is written as 0.
    bool record_timing = true;
};

struct RoundRecord {
    std::size_t round = 0;
    double train_loss = 0.0;
    double test_acc = 0.0;
    double elapsed_s = 0.0;
    bool divergent = false;
};

/// Loss as reported: clamped to [0, 1e4], NaN reported as 1e4.
double clamp_reported_loss(double loss) noexcept;

/// Batches drawn without replacement from a shard; the shard is reshuffled
/// whenever fewer than b unseen samples remain.
class ShardSampler {
public:
    ShardSampler(std::vector<std::size_t> shard, num::RngStream rng);
    std::span<std::size_t const> next(std::size_t batch_size);
    std::size_t shard_size() const noexcept { return order_.size(); }

private:
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    num::RngStream rng_;
};

struct ClientState {
    std::size_t id = 0;
    bool malicious = false;
    num::ParamVector momentum;
    std::shared_ptr<attacks::ClientCallback const> hooks;
    ShardSampler sampler;
};

/// The stream client `id` draws its batches from.
num::RngStream client_batch_stream(num::RngStream const& root, std::size_t id);

struct LocalResult {
    num::ParamVector delta;
    /// The local model after the last step.
    num::ParamVector endpoint;
    double mean_loss = 0.0;
    bool divergent = false;
};

LocalResult client_local_round(ClientState& state, num::ParamVector const& w0, ClientOptConfig const& cfg,
                               models::Objective const& objective, data::Dataset const& train);

struct ServerState {
    num::ParamVector w;
    num::ParamVector momentum;
    num::ParamVector cc_memory;
    std::vector<double> norm_history;
    std::size_t round = 0;
};

/// p = -delta; m = beta m + p; w = w - lr(t) m. Returns false (and leaves
/// the state untouched) when the new w is not finite.
bool server_step(ServerState& state, num::ParamVector const& agg_delta, ServerOptConfig const& cfg);

/// A trial in progress.
class Simulation {
public:
    Simulation(TrialSpec spec, RunOptions options = {});
    ~Simulation();
    Simulation(Simulation const&) = delete;
    Simulation& operator=(Simulation const&) = delete;

    RoundRecord run_round();
    bool aborted() const noexcept { return aborted_; }

    TrialSpec const& spec() const noexcept { return spec_; }
    ServerState const& server() const noexcept { return server_; }
    std::vector<ClientState> const& clients() const noexcept { return clients_; }
    data::Dataset const& train_set() const noexcept { return train_; }
    data::Dataset const& test_set() const noexcept { return test_; }
    data::Partition const& partition() const noexcept { return partition_; }
    std::size_t divergent_rounds() const noexcept { return divergent_rounds_; }
    std::size_t divergent_client_rounds() const noexcept { return divergent_client_rounds_; }
    /// Update set of the last round after the adversary and before aggregation.
    num::UpdateSet const& last_updates() const noexcept { return last_updates_; }
    models::Evaluation evaluate() const;

private:
    struct Workers;

    TrialSpec spec_;
    RunOptions options_;
    num::RngStream root_;
    std::unique_ptr<models::ModelObjective> objective_;
    data::Dataset train_;
    data::Dataset test_;
    models::Batch test_batch_;
    data::Partition partition_;
    std::vector<ClientState> clients_;
    ServerState server_;
    attacks::AttackPlan attack_;
    std::unique_ptr<Workers> workers_;
    num::UpdateSet last_updates_;
    double last_acc_ = 0.0;
    std::size_t divergent_rounds_ = 0;
    std::size_t divergent_client_rounds_ = 0;
    bool aborted_ = false;
};

struct TrialResult {
    std::vector<RoundRecord> records;
    /// "ok" or "diverged".
    std::string status = "ok";
    models::Evaluation initial;
    models::Evaluation final_eval;
    num::ParamVector final_w;
    std::size_t divergent_rounds = 0;
    std::size_t divergent_client_rounds = 0;
    std::size_t partition_repairs = 0;
};

TrialResult run_trial(TrialSpec const& spec, RunOptions const& options = {});

/// Worker-thread count after applying BYZFL_THREADS; `requested` wins when
/// non-zero.
std::size_t resolve_threads(std::size_t requested);

}  // namespace byzfl::protocol
