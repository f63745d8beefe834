// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "byzfl/error.hpp"
#include "byzfl/harness/harness.hpp"

namespace byzfl::harness {
namespace {

using protocol::TrialSpec;

[[noreturn]] void fail(std::string const& path, std::string const& what) {
    throw ConfigError(path + ": " + what);
}

std::string join(std::string const& path, std::string const& key) {
    return path.empty() ? key : path + "." + key;
}

bool is_grid(json const& v) {
    return v.is_object() && v.size() == 1 && v.contains("grid_search");
}

// Lowercase with separators dropped, so "LabelFlipAdversary", "label_flip"
// and "label-flip" compare equal.
std::string squash(std::string_view s) {
    std::string out;
    for (char ch : s)
        if (std::isalnum(static_cast<unsigned char>(ch)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

class Reader {
public:
    Reader(json const& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            fail(path_, "expected an object");
    }

    void allow(std::initializer_list<char const*> keys) {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto const& [k, v] : obj_.items())
            if (!ok.count(k))
                fail(join(path_, k), "unknown key");
    }

    bool has(char const* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    json const& at(char const* key) const { return obj_.at(key); }
    std::string path(char const* key) const { return join(path_, key); }

    double number(char const* key, double fallback) const {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_number())
            fail(path(key), "expected a number");
        return v.get<double>();
    }
    std::optional<double> opt_number(char const* key) const {
        if (!has(key))
            return std::nullopt;
        return number(key, 0.0);
    }
    std::uint64_t count(char const* key, std::uint64_t fallback) const {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        if (v.is_number_float() && v.get<double>() >= 0 && v.get<double>() == std::floor(v.get<double>()))
            return static_cast<std::uint64_t>(v.get<double>());
        fail(path(key), "expected a non-negative integer");
    }
    std::optional<std::uint64_t> opt_count(char const* key) const {
        if (!has(key))
            return std::nullopt;
        return count(key, 0);
    }
    std::string string(char const* key, std::string fallback) const {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_string())
            fail(path(key), "expected a string");
        return v.get<std::string>();
    }
    bool boolean(char const* key, bool fallback) const {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_boolean())
            fail(path(key), "expected true or false");
        return v.get<bool>();
    }

private:
    json const& obj_;
    std::string path_;
};

template <class F>
auto rethrow_at(std::string const& path, F&& f) {
    try {
        return f();
    } catch (ConfigError const& e) {
        // Messages that already carry a path are kept as they are.
        std::string what = e.what();
        if (what.rfind(path, 0) == 0)
            throw;
        fail(path, what);
    }
}

void read_model(json const& v, std::string const& path, models::ModelSpec& model) {
    if (v.is_string()) {
        model.kind = rethrow_at(path, [&] { return models::parse_model_kind(squash(v.get<std::string>())); });
        if (model.kind == models::ModelKind::mlp)
            model.hidden_dim = 32;
        return;
    }
    Reader r(v, path);
    r.allow({"type", "hidden_dim", "activation"});
    if (!r.has("type"))
        fail(r.path("type"), "required");
    model.kind = rethrow_at(r.path("type"), [&] { return models::parse_model_kind(squash(r.string("type", ""))); });
    model.hidden_dim = r.count("hidden_dim", model.kind == models::ModelKind::mlp ? 32 : 0);
    if (r.has("activation"))
        model.activation =
            rethrow_at(r.path("activation"), [&] { return models::parse_activation(r.string("activation", "")); });
}

void read_data(json const& v, std::string const& path, TrialSpec& spec) {
    Reader r(v, path);
    r.allow({"dataset", "num_classes", "input_dim", "samples_per_class", "separation", "path", "partition", "alpha",
             "batch_size", "test_fraction"});
    auto& d = spec.data;
    std::string const ds = squash(r.string("dataset", "synthetic"));
    if (ds == "synthetic")
        d.dataset = protocol::DatasetKind::synthetic;
    else if (ds == "csv")
        d.dataset = protocol::DatasetKind::csv;
    else
        fail(r.path("dataset"), "expected synthetic or csv");
    d.num_classes = r.count("num_classes", d.num_classes);
    d.input_dim = r.count("input_dim", d.input_dim);
    d.samples_per_class = r.count("samples_per_class", d.samples_per_class);
    d.separation = r.number("separation", d.separation);
    d.csv_path = r.string("path", "");
    std::string const part = squash(r.string("partition", "iid"));
    if (part == "iid")
        d.partition = data::PartitionScheme::iid;
    else if (part == "dirichlet" || part == "noniid")
        d.partition = data::PartitionScheme::dirichlet;
    else
        fail(r.path("partition"), "expected iid or dirichlet");
    d.alpha = r.number("alpha", d.alpha);
    spec.client.batch_size = r.count("batch_size", spec.client.batch_size);
    d.test_fraction = r.number("test_fraction", d.test_fraction);
}

void read_client(json const& v, std::string const& path, TrialSpec& spec) {
    Reader r(v, path);
    r.allow({"lr", "local_steps", "momentum", "grad_clip", "reset_momentum"});
    auto& c = spec.client;
    c.lr = r.number("lr", c.lr);
    c.local_steps = r.count("local_steps", c.local_steps);
    c.momentum = r.number("momentum", c.momentum);
    c.grad_clip = r.opt_number("grad_clip");
    c.reset_momentum = r.boolean("reset_momentum", c.reset_momentum);
}

void read_aggregator(json const& v, std::string const& path, agg::AggregatorConfig& a) {
    if (v.is_string()) {
        a.kind = rethrow_at(path, [&] { return agg::parse_agg_kind(v.get<std::string>()); });
        return;
    }
    Reader r(v, path);
    if (!r.has("type"))
        fail(r.path("type"), "required");
    a.kind = rethrow_at(r.path("type"), [&] { return agg::parse_agg_kind(r.string("type", "")); });
    switch (a.kind) {
    case agg::AggKind::mean:
    case agg::AggKind::median: r.allow({"type"}); break;
    case agg::AggKind::trimmed_mean:
        r.allow({"type", "b"});
        a.trim_b = r.count("b", a.trim_b);
        break;
    case agg::AggKind::geomed:
        r.allow({"type", "max_iters", "eps"});
        a.geomed_max_iters = r.count("max_iters", a.geomed_max_iters);
        a.geomed_eps = r.number("eps", a.geomed_eps);
        break;
    case agg::AggKind::krum:
        r.allow({"type", "f"});
        if (auto f = r.opt_count("f"))
            a.f = *f;
        break;
    case agg::AggKind::cc:
        r.allow({"type", "tau", "iters"});
        a.cc_tau = r.number("tau", a.cc_tau);
        a.cc_iters = r.count("iters", a.cc_iters);
        break;
    case agg::AggKind::dnc:
        r.allow({"type", "niters", "sub_dim", "c", "f"});
        a.dnc_niters = r.count("niters", a.dnc_niters);
        if (auto s = r.opt_count("sub_dim"))
            a.dnc_sub_dim = *s;
        a.dnc_c = r.number("c", a.dnc_c);
        if (auto f = r.opt_count("f"))
            a.f = *f;
        break;
    case agg::AggKind::clipped_clustering:
        r.allow({"type", "historical_norm"});
        a.cluster_historical_norm = r.boolean("historical_norm", false);
        break;
    case agg::AggKind::signguard:
        r.allow({"type", "lower", "upper", "coord_frac"});
        a.sg_lower = r.number("lower", a.sg_lower);
        a.sg_upper = r.number("upper", a.sg_upper);
        a.sg_coord_frac = r.number("coord_frac", a.sg_coord_frac);
        break;
    }
}

void read_optimizer(json const& v, std::string const& path, protocol::ServerOptConfig& s) {
    Reader r(v, path);
    r.allow({"type", "lr", "lr_schedule", "momentum"});
    if (squash(r.string("type", "sgd")) != "sgd")
        fail(r.path("type"), "only SGD is supported");
    s.momentum = r.number("momentum", s.momentum);
    if (r.has("lr_schedule")) {
        auto const& sched = r.at("lr_schedule");
        std::string const sp = r.path("lr_schedule");
        if (!sched.is_array() || sched.empty())
            fail(sp, "expected a non-empty list of [round, lr] pairs");
        s.lr_schedule.steps.clear();
        for (std::size_t i = 0; i < sched.size(); ++i) {
            auto const& e = sched[i];
            std::string const ep = sp + "[" + std::to_string(i) + "]";
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number() ||
                e[0].get<std::int64_t>() < 0)
                fail(ep, "expected [round, lr]");
            s.lr_schedule.steps.emplace_back(e[0].get<std::size_t>(), e[1].get<double>());
        }
        if (r.has("lr") && r.number("lr", 0.0) != s.lr_schedule.steps.front().second)
            spdlog::warn("{}: lr differs from the first lr_schedule entry; the schedule wins", r.path("lr"));
    } else if (r.has("lr")) {
        s.lr_schedule.steps = {{0, r.number("lr", 1.0)}};
    }
}

void read_transforms(json const& v, std::string const& path, agg::TransformConfig& t) {
    Reader r(v, path);
    r.allow({"clip_tau", "dp"});
    t.clip_tau = r.opt_number("clip_tau");
    if (r.has("dp")) {
        Reader dr(r.at("dp"), r.path("dp"));
        dr.allow({"epsilon", "delta", "g_max", "batch_b"});
        agg::DpConfig dp;
        dp.epsilon = dr.number("epsilon", dp.epsilon);
        dp.delta = dr.number("delta", dp.delta);
        dp.g_max = dr.number("g_max", dp.g_max);
        dp.batch_b = dr.count("batch_b", dp.batch_b);
        t.dp = dp;
    }
}

void read_server(json const& v, std::string const& path, TrialSpec& spec) {
    Reader r(v, path);
    r.allow({"aggregator", "AGR", "bucketing", "optimizer", "transforms"});
    if (r.has("aggregator") && r.has("AGR"))
        fail(path, "give aggregator or AGR, not both");
    if (r.has("aggregator"))
        read_aggregator(r.at("aggregator"), r.path("aggregator"), spec.aggregator);
    else if (r.has("AGR"))
        read_aggregator(r.at("AGR"), r.path("AGR"), spec.aggregator);
    if (auto s = r.opt_count("bucketing"))
        spec.aggregator.bucketing = *s;
    if (r.has("optimizer"))
        read_optimizer(r.at("optimizer"), r.path("optimizer"), spec.server);
    if (r.has("transforms"))
        read_transforms(r.at("transforms"), r.path("transforms"), spec.transforms);
}

void read_adversary(json const& v, std::string const& path, TrialSpec& spec) {
    Reader r(v, path);
    if (!r.has("type"))
        fail(r.path("type"), "required");
    auto const kind =
        rethrow_at(r.path("type"), [&] { return attacks::parse_attack_kind(r.string("type", "")); });
    auto cfg = attacks::AttackConfig::defaults_for(kind);
    switch (kind) {
    case attacks::AttackKind::label_flip:
    case attacks::AttackKind::sign_flip: r.allow({"type", "level"}); break;
    case attacks::AttackKind::noise:
        r.allow({"type", "level", "std"});
        cfg.noise_std = r.number("std", cfg.noise_std);
        break;
    case attacks::AttackKind::alie:
        r.allow({"type", "level", "z", "auto_z", "direction"});
        cfg.alie.z_max = r.number("z", cfg.alie.z_max);
        cfg.alie.auto_z = r.boolean("auto_z", cfg.alie.auto_z);
        cfg.alie.direction_sign = r.number("direction", 1.0) < 0 ? -1 : 1;
        break;
    case attacks::AttackKind::ipm:
        r.allow({"type", "level", "scale", "alpha", "epsilon"});
        cfg.ipm_epsilon = r.number("scale", r.number("alpha", r.number("epsilon", cfg.ipm_epsilon)));
        break;
    case attacks::AttackKind::minmax:
        r.allow({"type", "level", "perturbation", "gamma_init", "gamma_tol"});
        if (r.has("perturbation"))
            cfg.minmax.perturbation = rethrow_at(r.path("perturbation"), [&] {
                return attacks::parse_perturbation(r.string("perturbation", ""));
            });
        cfg.minmax.gamma_init = r.number("gamma_init", cfg.minmax.gamma_init);
        cfg.minmax.gamma_tol = r.number("gamma_tol", cfg.minmax.gamma_tol);
        break;
    }
    cfg.level = static_cast<int>(r.count("level", static_cast<std::uint64_t>(cfg.level)));
    spec.attack = cfg;
}

void read_config(json const& v, TrialSpec& spec) {
    Reader r(v, "config");
    r.allow({"global_model", "data_config", "num_clients", "num_malicious_clients", "client_config", "server_config",
             "adversary_config", "eval_interval", "divergence", "adversary_view", "malicious_majority"});
    if (r.has("global_model"))
        read_model(r.at("global_model"), r.path("global_model"), spec.model);
    if (r.has("data_config"))
        read_data(r.at("data_config"), r.path("data_config"), spec);
    spec.num_clients = r.count("num_clients", spec.num_clients);
    spec.num_malicious = r.count("num_malicious_clients", spec.num_malicious);
    if (r.has("client_config"))
        read_client(r.at("client_config"), r.path("client_config"), spec);
    if (r.has("server_config"))
        read_server(r.at("server_config"), r.path("server_config"), spec);
    if (r.has("adversary_config"))
        read_adversary(r.at("adversary_config"), r.path("adversary_config"), spec);
    spec.eval_interval = r.count("eval_interval", spec.eval_interval);

    std::string const div = squash(r.string("divergence", "continue"));
    if (div == "continue")
        spec.divergence = protocol::DivergencePolicy::continue_clamped;
    else if (div == "abort")
        spec.divergence = protocol::DivergencePolicy::abort;
    else
        fail(r.path("divergence"), "expected continue or abort");

    std::string const view = squash(r.string("adversary_view", "post_transform"));
    if (view == "posttransform")
        spec.adversary_view = protocol::AdversaryTiming::post_transform;
    else if (view == "pretransform")
        spec.adversary_view = protocol::AdversaryTiming::pre_transform;
    else
        fail(r.path("adversary_view"), "expected post_transform or pre_transform");

    std::string const majority = squash(r.string("malicious_majority", "warn"));
    if (majority != "warn" && majority != "reject")
        fail(r.path("malicious_majority"), "expected warn or reject");
    if (2 * spec.num_malicious >= spec.num_clients && spec.num_malicious > 0) {
        if (majority == "reject")
            fail(r.path("num_malicious_clients"), "must be below num_clients / 2");
        spdlog::warn("num_malicious_clients={} is not below num_clients/2={}", spec.num_malicious,
                     static_cast<double>(spec.num_clients) / 2.0);
    }
}

}  // namespace

ExperimentConfig parse_experiment(std::string const& text) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (json::parse_error const& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n')
                ++line;
        throw ParseError(e.what(), line);
    }
    if (!raw.is_object())
        throw ConfigError("<root>: expected an object");
    Reader r(raw, "");
    r.allow({"run", "stop", "seed", "repetitions", "config"});
    return {std::move(raw)};
}

ExperimentConfig load_experiment(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment(ss.str());
}

std::vector<json> expand_value(json const& value) {
    if (is_grid(value)) {
        auto const& options = value.at("grid_search");
        if (!options.is_array() || options.empty())
            throw ConfigError("grid_search: expected a non-empty list");
        std::vector<json> out;
        for (auto const& opt : options)
            for (auto& v : expand_value(opt))
                out.push_back(std::move(v));
        return out;
    }
    if (value.is_object() || value.is_array()) {
        std::vector<json> out{value.is_object() ? json::object() : json::array()};
        for (auto it = value.begin(); it != value.end(); ++it) {
            auto const variants = expand_value(*it);
            std::vector<json> next;
            next.reserve(out.size() * variants.size());
            for (auto const& partial : out)
                for (auto const& v : variants) {
                    json j = partial;
                    if (value.is_object())
                        j[it.key()] = v;
                    else
                        j.push_back(v);
                    next.push_back(std::move(j));
                }
            out = std::move(next);
        }
        return out;
    }
    return {value};
}

protocol::TrialSpec resolve_trial(json const& resolved, std::size_t trial_id, std::size_t repetition) {
    Reader r(resolved, "");
    r.allow({"run", "stop", "seed", "repetitions", "config"});
    TrialSpec spec;
    spec.run = rethrow_at("run", [&] { return protocol::parse_run_tag(r.string("run", "FEDSGD")); });
    if (r.has("stop")) {
        Reader sr(r.at("stop"), "stop");
        sr.allow({"training_round"});
        spec.rounds = sr.count("training_round", spec.rounds);
    }
    spec.seed = r.count("seed", 0);
    if (r.has("config"))
        read_config(r.at("config"), spec);
    if (spec.run == protocol::RunTag::fedsgd) {
        if (spec.client.local_steps != 1 || spec.client.lr != 1.0)
            spdlog::debug("FEDSGD overrides client lr and local_steps");
        spec.apply_preset();
    }
    spec.root = num::RngStream::root(spec.seed).derive("trial", trial_id).derive("rep", repetition);
    spec.validate();
    return spec;
}

std::vector<Trial> expand_grid(ExperimentConfig const& cfg, std::optional<std::uint64_t> seed_override) {
    json base = cfg.raw;
    Reader top(base, "");
    std::size_t const reps = top.count("repetitions", 1);
    if (reps < 1)
        fail("repetitions", "must be at least 1");
    base.erase("repetitions");
    if (seed_override)
        base["seed"] = *seed_override;

    std::vector<Trial> out;
    for (auto& variant : expand_value(base)) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            Trial t;
            t.trial_id = out.size();
            t.repetition = rep;
            t.spec = resolve_trial(variant, t.trial_id, rep);
            t.config = variant;
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace byzfl::harness
