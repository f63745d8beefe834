// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/protocol/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"

namespace byzfl::protocol {

using num::ParamVector;

namespace {

constexpr double kLossClamp = 1e4;

// A delta that reconstructs wk exactly from w0 when added back, preferring
// the accumulated sum of steps.
double exact_delta(double w0, double wk, double accumulated) {
    if (w0 + accumulated == wk)
        return accumulated;
    double c = wk - w0;
    if (w0 + c == wk)
        return c;
    double up = c;
    double down = c;
    for (int i = 0; i < 4; ++i) {
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
        if (w0 + up == wk)
            return up;
        if (w0 + down == wk)
            return down;
    }
    return c;
}

[[noreturn]] void config_error(std::string const& field, std::string const& what) {
    throw ConfigError(field + ": " + what);
}

}  // namespace

std::string_view to_string(RunTag tag) noexcept {
    return tag == RunTag::fedsgd ? "FEDSGD" : "FEDAVG";
}

RunTag parse_run_tag(std::string_view name) {
    std::string up(name);
    for (auto& ch : up)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == "FEDSGD")
        return RunTag::fedsgd;
    if (up == "FEDAVG")
        return RunTag::fedavg;
    throw ConfigError("run: unknown tag '" + std::string(name) + "' (expected FEDSGD or FEDAVG)");
}

void ClientOptConfig::validate() const {
    if (!(lr > 0.0))
        config_error("client_config.lr", "must be positive");
    if (local_steps < 1)
        config_error("client_config.local_steps", "must be at least 1");
    if (!(momentum >= 0.0 && momentum < 1.0))
        config_error("client_config.momentum", "must be in [0, 1)");
    if (batch_size < 1)
        config_error("data_config.batch_size", "must be at least 1");
    if (grad_clip && !(*grad_clip > 0.0))
        config_error("client_config.grad_clip", "must be positive");
}

double LrSchedule::at(std::size_t round) const {
    double lr = steps.front().second;
    for (auto const& [r, v] : steps) {
        if (r > round)
            break;
        lr = v;
    }
    return lr;
}

void LrSchedule::validate() const {
    if (steps.empty() || steps.front().first != 0)
        config_error("server_config.optimizer.lr_schedule", "first entry must be at round 0");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i].second > 0.0))
            config_error("server_config.optimizer.lr_schedule", "learning rates must be positive");
        if (i > 0 && steps[i].first <= steps[i - 1].first)
            config_error("server_config.optimizer.lr_schedule", "rounds must be strictly increasing");
    }
}

void ServerOptConfig::validate() const {
    lr_schedule.validate();
    if (!(momentum >= 0.0 && momentum < 1.0))
        config_error("server_config.optimizer.momentum", "must be in [0, 1)");
}

void TrialSpec::apply_preset() {
    if (run == RunTag::fedsgd) {
        client.local_steps = 1;
        client.lr = 1.0;
    }
}

void TrialSpec::validate() const {
    if (num_clients < 1)
        config_error("num_clients", "must be at least 1");
    if (num_malicious >= num_clients && num_malicious > 0)
        config_error("num_malicious_clients", "must be below num_clients");
    if (eval_interval < 1)
        config_error("eval_interval", "must be at least 1");
    if (run == RunTag::fedsgd && (client.local_steps != 1 || client.lr != 1.0))
        config_error("client_config", "FEDSGD requires local_steps = 1 and lr = 1");
    client.validate();
    server.validate();
    try {
        agg::validate(aggregator);
    } catch (ConfigError const& e) {
        config_error("server_config.aggregator", e.what());
    }
    try {
        agg::validate(transforms);
    } catch (ConfigError const& e) {
        config_error("server_config", e.what());
    }
    std::size_t const n = aggregator.bucketing ? (num_clients + *aggregator.bucketing - 1) / *aggregator.bucketing
                                               : num_clients;
    if (aggregator.kind == agg::AggKind::trimmed_mean && 2 * aggregator.trim_b >= n)
        config_error("server_config.aggregator.b", "need 2b < number of aggregated rows");
    if (model.kind == models::ModelKind::mlp && model.hidden_dim == 0)
        config_error("global_model.hidden_dim", "mlp needs hidden_dim >= 1");
    if (!(data.test_fraction > 0.0 && data.test_fraction < 1.0))
        config_error("data_config.test_fraction", "must be in (0, 1)");
    if (data.partition == data::PartitionScheme::dirichlet && !(data.alpha > 0.0))
        config_error("data_config.alpha", "must be positive");
    if (data.dataset == DatasetKind::synthetic) {
        if (data.num_classes < 2)
            config_error("data_config.num_classes", "must be at least 2");
        if (data.input_dim < 1)
            config_error("data_config.input_dim", "must be at least 1");
        if (data.samples_per_class < 1)
            config_error("data_config.samples_per_class", "must be at least 1");
        if (!(data.separation > 0.0))
            config_error("data_config.separation", "must be positive");
    } else if (data.csv_path.empty()) {
        config_error("data_config.path", "required for csv datasets");
    }
    if (attack && attack->kind == attacks::AttackKind::noise && !(attack->noise_std >= 0.0))
        config_error("adversary_config.std", "must be non-negative");
}

num::RngStream TrialSpec::root_stream() const {
    return root ? *root : num::RngStream::root(seed);
}

double clamp_reported_loss(double loss) noexcept {
    if (std::isnan(loss))
        return kLossClamp;
    return std::clamp(loss, 0.0, kLossClamp);
}

ShardSampler::ShardSampler(std::vector<std::size_t> shard, num::RngStream rng)
    : order_(std::move(shard)), cursor_(order_.size()), rng_(std::move(rng)) {
    if (order_.empty())
        throw ParameterError("ShardSampler: empty shard");
}

std::span<std::size_t const> ShardSampler::next(std::size_t batch_size) {
    std::size_t const b = std::min(batch_size, order_.size());
    if (cursor_ + b > order_.size()) {
        num::shuffle(std::span<std::size_t>(order_), rng_);
        cursor_ = 0;
    }
    std::span<std::size_t const> out(order_.data() + cursor_, b);
    cursor_ += b;
    return out;
}

num::RngStream client_batch_stream(num::RngStream const& root, std::size_t id) {
    return root.derive("client", id).derive("batches");
}

LocalResult client_local_round(ClientState& state, ParamVector const& w0, ClientOptConfig const& cfg,
                               models::Objective const& objective, data::Dataset const& train) {
    auto const& k = num::active_kernels();
    std::size_t const d = w0.size();
    if (objective.param_dim() != d)
        throw DimensionError("client_local_round: model and parameter length disagree");
    if (state.momentum.size() != d)
        state.momentum = ParamVector(d);
    if (cfg.reset_momentum)
        std::fill(state.momentum.begin(), state.momentum.end(), 0.0);

    LocalResult out;
    ParamVector wk = w0;
    ParamVector acc(d);
    ParamVector grad(d);
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < cfg.local_steps; ++step) {
        auto const idx = state.sampler.next(cfg.batch_size);
        models::Batch batch = data::gather(train, idx);
        if (state.hooks)
            state.hooks->on_batch_begin(batch);
        double const loss = objective.loss_and_grad(wk.span(), batch, grad.span());
        if (!std::isfinite(loss) || !grad.all_finite()) {
            out.delta = ParamVector(d);
            out.mean_loss = loss;
            out.divergent = true;
            return out;
        }
        loss_sum += loss;
        if (state.hooks)
            state.hooks->on_backward_end(grad.span());
        if (cfg.grad_clip)
            grad = agg::clip_update(grad, *cfg.grad_clip);
        double const* m = grad.data();
        if (cfg.momentum != 0.0) {
            k.scale(cfg.momentum, state.momentum.data(), d);
            k.add(grad.data(), state.momentum.data(), d);
            m = state.momentum.data();
        }
        k.axpy(-cfg.lr, m, wk.data(), d);
        k.axpy(-cfg.lr, m, acc.data(), d);
    }
    out.delta = ParamVector(d);
    for (std::size_t i = 0; i < d; ++i)
        out.delta[i] = exact_delta(w0[i], wk[i], acc[i]);
    out.mean_loss = loss_sum / static_cast<double>(cfg.local_steps);
    out.endpoint = std::move(wk);
    return out;
}

bool server_step(ServerState& state, ParamVector const& agg_delta, ServerOptConfig const& cfg) {
    auto const& k = num::active_kernels();
    std::size_t const d = state.w.size();
    if (agg_delta.size() != d)
        throw DimensionError("server_step: update has wrong length");
    if (state.momentum.size() != d)
        state.momentum = ParamVector(d);
    ParamVector p(d);
    for (std::size_t i = 0; i < d; ++i)
        p[i] = -agg_delta[i];
    ParamVector momentum = state.momentum;
    double const* m = p.data();
    if (cfg.momentum != 0.0) {
        k.scale(cfg.momentum, momentum.data(), d);
        k.add(p.data(), momentum.data(), d);
        m = momentum.data();
    }
    ParamVector w = state.w;
    k.axpy(-cfg.lr_schedule.at(state.round), m, w.data(), d);
    if (!w.all_finite())
        return false;
    state.w = std::move(w);
    state.momentum = std::move(momentum);
    return true;
}

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0)
        return requested;
    if (char const* env = std::getenv("BYZFL_THREADS")) {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<std::size_t>(v);
        spdlog::warn("ignoring BYZFL_THREADS='{}'", env);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Simulation::Workers {
    explicit Workers(std::size_t threads) : arena(static_cast<int>(threads)) {}
    tbb::task_arena arena;
};

Simulation::Simulation(TrialSpec spec, RunOptions options)
    : spec_(std::move(spec)), options_(options), root_(spec_.root_stream()) {
    spec_.apply_preset();
    spec_.validate();

    data::Dataset full;
    if (spec_.data.dataset == DatasetKind::synthetic) {
        num::RngStream rng = root_.derive("data");
        full = data::synth_gaussian_mixture(spec_.data.num_classes, spec_.data.input_dim,
                                            spec_.data.samples_per_class, spec_.data.separation, rng);
    } else {
        full = data::load_csv(spec_.data.csv_path);
    }
    {
        num::RngStream rng = root_.derive("split");
        auto split = data::split_holdout(full, spec_.data.test_fraction, rng);
        train_ = std::move(split.train);
        test_ = std::move(split.test);
    }
    test_batch_ = data::as_batch(test_);
    spec_.model.input_dim = train_.input_dim();
    spec_.model.num_classes = full.num_classes;
    spec_.model.validate();
    objective_ = std::make_unique<models::ModelObjective>(spec_.model);

    {
        num::RngStream rng = root_.derive("partition");
        partition_ = spec_.data.partition == data::PartitionScheme::iid
                         ? data::partition_iid(train_, spec_.num_clients, rng)
                         : data::partition_dirichlet(train_, spec_.num_clients, spec_.data.alpha, rng);
    }

    if (spec_.attack && spec_.num_malicious > 0)
        attack_ = attacks::make_attack(*spec_.attack, spec_.model.num_classes);

    std::size_t const d = spec_.model.param_dim();
    clients_.reserve(spec_.num_clients);
    for (std::size_t id = 0; id < spec_.num_clients; ++id) {
        bool const malicious = id < spec_.num_malicious;
        clients_.push_back(ClientState{id, malicious, ParamVector(d), malicious ? attack_.client : nullptr,
                                       ShardSampler(partition_.assignments[id], client_batch_stream(root_, id))});
    }

    num::RngStream init_rng = root_.derive("model");
    server_.w = models::init_params(spec_.model, init_rng);
    server_.momentum = ParamVector(d);
    server_.cc_memory = ParamVector(d);

    if (attack_.adversary)
        attack_.adversary->on_algorithm_begin(
            {spec_.num_clients, spec_.num_malicious, spec_.model.num_classes, d});

    workers_ = std::make_unique<Workers>(resolve_threads(options_.threads));
    last_acc_ = evaluate().accuracy;
}

Simulation::~Simulation() = default;

models::Evaluation Simulation::evaluate() const {
    return models::evaluate(spec_.model, server_.w, test_batch_);
}

RoundRecord Simulation::run_round() {
    auto const start = std::chrono::steady_clock::now();
    std::size_t const t = server_.round;
    std::size_t const n = clients_.size();
    std::size_t const d = server_.w.size();
    bool const adversary_only = attack_.adversary && !attack_.client;
    bool const transform_after = spec_.adversary_view == AdversaryTiming::pre_transform;

    num::Matrix rows(n, d);
    std::vector<double> losses(n, 0.0);
    std::vector<char> trained(n, 0);
    std::vector<char> diverged(n, 0);
    ParamVector const w0 = server_.w;
    // With a unit step and no server momentum, an aggregate equal to one
    // client's own delta moves the server onto that client's local model.
    // w0 + delta cannot always reproduce it exactly, so keep the endpoints.
    bool const unit_step = spec_.server.momentum == 0.0 && spec_.server.lr_schedule.at(t) == 1.0;
    std::vector<ParamVector> endpoints(unit_step ? n : 0);
    std::vector<ParamVector> raw(unit_step ? n : 0);

    auto transform = [&](std::size_t i) {
        if (spec_.transforms.empty())
            return;
        ParamVector delta(rows.row(i));
        num::RngStream rng = root_.derive("client", i).derive("dp", t);
        auto const out = agg::apply_transforms(delta, spec_.transforms, rng);
        std::copy(out.begin(), out.end(), rows.row(i).begin());
    };

    auto work = [&](std::size_t i) {
        ClientState& c = clients_[i];
        if (c.malicious && adversary_only)
            return;
        auto res = client_local_round(c, w0, spec_.client, *objective_, train_);
        std::copy(res.delta.begin(), res.delta.end(), rows.row(i).begin());
        if (unit_step && !res.divergent) {
            endpoints[i] = std::move(res.endpoint);
            raw[i] = std::move(res.delta);
        }
        losses[i] = res.mean_loss;
        trained[i] = 1;
        diverged[i] = res.divergent ? 1 : 0;
        if (!transform_after)
            transform(i);
    };
    workers_->arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1),
                          [&](tbb::blocked_range<std::size_t> const& r) {
                              for (std::size_t i = r.begin(); i != r.end(); ++i)
                                  work(i);
                          },
                          tbb::simple_partitioner());
    });

    std::vector<bool> byz(n);
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        byz[i] = clients_[i].malicious;
        ids[i] = i;
    }
    num::UpdateSet updates(std::move(rows), std::move(byz), std::move(ids));

    if (attack_.adversary) {
        attacks::AdversaryView view(updates, t, root_.derive("adversary", t));
        attack_.adversary->on_local_round_end(view);
    }
    if (transform_after) {
        for (std::size_t i = 0; i < n; ++i) {
            if (clients_[i].malicious && adversary_only)
                continue;
            ParamVector delta(updates.row(i));
            num::RngStream rng = root_.derive("client", i).derive("dp", t);
            auto const out = agg::apply_transforms(delta, spec_.transforms, rng);
            std::copy(out.begin(), out.end(), updates.row(i).begin());
        }
    }

    num::RngStream agg_rng = root_.derive("aggregator", t);
    agg::AggregateContext ctx{server_.cc_memory.span(), spec_.num_malicious, &server_.norm_history};
    ParamVector const agg_delta = agg::aggregate(updates, spec_.aggregator, agg_rng, ctx);

    RoundRecord rec;
    rec.round = t + 1;
    bool const ok = agg_delta.all_finite() && server_step(server_, agg_delta, spec_.server);
    if (ok) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!raw[i].empty() && raw[i] == agg_delta && endpoints[i].all_finite()) {
                server_.w = endpoints[i];
                break;
            }
        }
        server_.cc_memory = agg_delta;
    }
    // A client whose loss went non-finite sent a zero delta; the round still
    // counts as divergent.
    bool const client_div = std::any_of(diverged.begin(), diverged.end(), [](char c) { return c != 0; });
    if (!ok || client_div) {
        rec.divergent = true;
        ++divergent_rounds_;
        if (spec_.divergence == DivergencePolicy::abort)
            aborted_ = true;
    }
    server_.round = t + 1;

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diverged[i])
            ++divergent_client_rounds_;
        if (trained[i] && !clients_[i].malicious) {
            loss_sum += losses[i];
            ++loss_count;
        }
    }
    double const train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.train_loss = rec.divergent ? kLossClamp : clamp_reported_loss(train_loss);

    if (rec.round % spec_.eval_interval == 0 || rec.round == spec_.rounds)
        last_acc_ = evaluate().accuracy;
    rec.test_acc = last_acc_;
    last_updates_ = std::move(updates);
    if (options_.record_timing)
        rec.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

TrialResult run_trial(TrialSpec const& spec, RunOptions const& options) {
    Simulation sim(spec, options);
    TrialResult out;
    out.initial = sim.evaluate();
    out.partition_repairs = sim.partition().repairs;
    for (std::size_t t = 0; t < sim.spec().rounds; ++t) {
        out.records.push_back(sim.run_round());
        if (sim.aborted()) {
            out.status = "diverged";
            break;
        }
    }
    out.final_eval = sim.evaluate();
    out.final_w = sim.server().w;
    out.divergent_rounds = sim.divergent_rounds();
    out.divergent_client_rounds = sim.divergent_client_rounds();
    return out;
}

}  // namespace byzfl::protocol
