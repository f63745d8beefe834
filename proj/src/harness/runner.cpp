// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "byzfl/error.hpp"
#include "byzfl/harness/harness.hpp"

namespace byzfl::harness {
namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

char const* kind_name(std::size_t status_code) {
    switch (status_code) {
    case 0: return "ok";
    case 1: return "diverged";
    default: return "failed";
    }
}

}  // namespace

std::string format_records_csv(std::vector<protocol::RoundRecord> const& records) {
    std::string out = "round,train_loss,test_acc,elapsed_s\n";
    for (auto const& r : records) {
        out += std::to_string(r.round);
        out += ',';
        append_double(out, r.train_loss);
        out += ',';
        append_double(out, r.test_acc);
        out += ',';
        append_double(out, r.elapsed_s);
        out += '\n';
    }
    return out;
}

json manifest_json(std::vector<ManifestEntry> const& entries) {
    json arr = json::array();
    for (auto const& e : entries) {
        json j;
        j["trial_id"] = e.trial_id;
        j["repetition"] = e.repetition;
        j["config"] = e.config;
        j["csv_path"] = e.csv_path;
        j["status"] = e.status;
        j["total_s"] = e.total_s;
        j["metadata"] = {{"partition_repairs", e.partition_repairs}, {"divergent_rounds", e.divergent_rounds}};
        if (!e.error.empty())
            j["error"] = e.error;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<ManifestEntry> run_experiment(ExperimentConfig const& cfg, ExperimentOptions const& options) {
    auto const trials = expand_grid(cfg, options.seed_override);
    std::filesystem::create_directories(options.out_dir);

    std::vector<ManifestEntry> manifest(trials.size());
    protocol::RunOptions run_opts{protocol::resolve_threads(options.threads), options.record_timing};
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < trials.size(); i = next++) {
            auto const& trial = trials[i];
            auto& e = manifest[i];
            e.trial_id = trial.trial_id;
            e.repetition = trial.repetition;
            e.config = trial.config;
            char name[32];
            std::snprintf(name, sizeof name, "trial_%04zu.csv", trial.trial_id);
            auto const csv = options.out_dir / name;
            e.csv_path = csv.string();
            auto const start = std::chrono::steady_clock::now();
            std::size_t code = 0;
            try {
                auto const res = protocol::run_trial(trial.spec, run_opts);
                std::ofstream out(csv, std::ios::binary);
                out << format_records_csv(res.records);
                if (!out)
                    throw Error("cannot write " + csv.string());
                code = res.status == "ok" ? 0 : 1;
                e.partition_repairs = res.partition_repairs;
                e.divergent_rounds = res.divergent_rounds;
            } catch (std::exception const& ex) {
                code = 2;
                e.error = ex.what();
                spdlog::error("trial {} failed: {}", trial.trial_id, ex.what());
            }
            e.status = kind_name(code);
            e.total_s = options.record_timing
                            ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                            : 0.0;
        }
    };

    std::size_t const pool = std::max<std::size_t>(1, std::min(options.parallelism, trials.size()));
    std::vector<std::thread> threads;
    for (std::size_t i = 1; i < pool; ++i)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();

    std::ofstream out(options.out_dir / "manifest.json", std::ios::binary);
    out << manifest_json(manifest).dump(2) << '\n';
    return manifest;
}

protocol::TrialSpec default_bench_spec() {
    protocol::TrialSpec spec;
    spec.run = protocol::RunTag::fedavg;
    spec.model.kind = models::ModelKind::mlp;
    spec.model.hidden_dim = 64;
    spec.data.num_classes = 4;
    spec.data.input_dim = 32;
    spec.data.samples_per_class = 2000;
    spec.data.separation = 4.0;
    spec.client.lr = 0.05;
    spec.client.local_steps = 5;
    spec.client.batch_size = 32;
    spec.aggregator.kind = agg::AggKind::median;
    spec.eval_interval = 1000000;
    spec.seed = 7;
    return spec;
}

namespace {

std::pair<double, double> time_rounds(protocol::TrialSpec spec, std::size_t rounds, std::size_t threads) {
    spec.rounds = rounds + 1;
    protocol::Simulation sim(spec, {threads, true});
    sim.run_round();
    std::vector<double> t;
    for (std::size_t r = 0; r < rounds; ++r)
        t.push_back(sim.run_round().elapsed_s);
    double mean = 0.0;
    for (double v : t)
        mean += v;
    mean /= static_cast<double>(t.size());
    double var = 0.0;
    for (double v : t)
        var += (v - mean) * (v - mean);
    double const sd = t.size() > 1 ? std::sqrt(var / static_cast<double>(t.size() - 1)) : 0.0;
    return {mean, sd};
}

}  // namespace

ScalingReport bench_scaling(protocol::TrialSpec const& base, std::vector<std::size_t> const& client_counts,
                            std::size_t rounds, std::vector<std::size_t> const& thread_levels) {
    if (client_counts.empty() || rounds == 0)
        throw ConfigError("bench-scaling: need at least one client count and one round");
    if (!std::is_sorted(client_counts.begin(), client_counts.end()))
        throw ConfigError("bench-scaling: client counts must be ascending");
    ScalingReport report;
    for (auto k : client_counts) {
        auto spec = base;
        spec.num_clients = k;
        auto const [avg, sd] = time_rounds(spec, rounds, 1);
        report.by_clients.push_back({k, avg, sd});
    }
    report.fixed_clients = client_counts.back();
    double base_avg = 0.0;
    for (auto th : thread_levels) {
        auto spec = base;
        spec.num_clients = report.fixed_clients;
        auto const [avg, sd] = time_rounds(spec, rounds, th);
        if (report.by_threads.empty())
            base_avg = avg;
        report.by_threads.push_back({th, avg, sd, base_avg / avg});
    }
    return report;
}

std::string format_scaling_csv(ScalingReport const& report) {
    std::string out = "K,avg_s,std_s\n";
    for (auto const& r : report.by_clients) {
        out += std::to_string(r.num_clients) + ',';
        append_double(out, r.avg_s);
        out += ',';
        append_double(out, r.std_s);
        out += '\n';
    }
    out += "\nthreads,avg_s,std_s,speedup\n";
    for (auto const& r : report.by_threads) {
        out += std::to_string(r.threads) + ',';
        append_double(out, r.avg_s);
        out += ',';
        append_double(out, r.std_s);
        out += ',';
        append_double(out, r.speedup);
        out += '\n';
    }
    return out;
}

}  // namespace byzfl::harness
