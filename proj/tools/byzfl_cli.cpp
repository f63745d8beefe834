// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

// byzfl run|expand|list|bench-scaling

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "byzfl/aggregators/aggregators.hpp"
#include "byzfl/attacks/attacks.hpp"
#include "byzfl/error.hpp"
#include "byzfl/harness/harness.hpp"
#include "byzfl/numcore/kernels.hpp"

using namespace byzfl;

int main(int argc, char** argv) {
    CLI::App app{"Byzantine federated learning simulator"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    app.add_option("--seed", seed, "override the experiment seed");
    app.add_option("--threads", threads, "client-phase worker threads (default: BYZFL_THREADS or all cores)");

    auto* run = app.add_subcommand("run", "run every trial of an experiment");
    std::string config_path;
    std::string out_dir = "results";
    std::size_t parallelism = 1;
    bool no_timing = false;
    run->add_option("config", config_path)->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--parallelism", parallelism, "concurrent trials");
    run->add_option("--seed", seed, "override the experiment seed");
    run->add_option("--threads", threads, "client-phase worker threads");
    run->add_flag("--no-timing", no_timing, "write 0 for elapsed_s so CSVs are byte-stable");

    auto* expand = app.add_subcommand("expand", "print the trials of an experiment without running them");
    expand->add_option("config", config_path)->required();
    expand->add_option("--seed", seed, "override the experiment seed");

    auto* list = app.add_subcommand("list", "list registered components");
    std::string what;
    list->add_option("what", what)->required()->check(CLI::IsMember({"aggregators", "attacks", "models", "kernels"}));

    auto* bench = app.add_subcommand("bench-scaling", "time rounds for growing client counts");
    std::vector<std::size_t> clients{16, 32, 64, 128};
    std::size_t rounds = 5;
    std::vector<std::size_t> levels{1, 2, 4};
    std::string bench_out;
    bench->add_option("--clients", clients, "ascending client counts")->delimiter(',');
    bench->add_option("--rounds", rounds, "timed rounds per row");
    bench->add_option("--parallelism", levels, "thread levels for the fixed-K rows")->delimiter(',');
    bench->add_option("--out", bench_out, "write the CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            if (what == "aggregators")
                for (auto k : agg::all_aggregators())
                    std::cout << agg::to_string(k) << '\n';
            else if (what == "attacks")
                for (auto k : attacks::all_attacks())
                    std::cout << attacks::to_string(k) << " (level " << attacks::default_level(k) << ")\n";
            else if (what == "models")
                for (auto k : {models::ModelKind::linear, models::ModelKind::logistic, models::ModelKind::mlp})
                    std::cout << models::to_string(k) << '\n';
            else
                for (auto const* k : num::available_kernels())
                    std::cout << k->name << (k == &num::active_kernels() ? " (active)" : "") << '\n';
            return 0;
        }
        if (*expand) {
            auto const trials = harness::expand_grid(harness::load_experiment(config_path), seed);
            for (auto const& t : trials) {
                harness::json j;
                j["trial_id"] = t.trial_id;
                j["repetition"] = t.repetition;
                j["config"] = t.config;
                std::cout << j.dump() << '\n';
            }
            std::cerr << trials.size() << " trials\n";
            return 0;
        }
        if (*run) {
            harness::ExperimentOptions opts;
            opts.out_dir = out_dir;
            opts.parallelism = parallelism;
            opts.threads = threads;
            opts.record_timing = !no_timing;
            opts.seed_override = seed;
            auto const manifest = harness::run_experiment(harness::load_experiment(config_path), opts);
            std::size_t bad = 0;
            for (auto const& e : manifest) {
                std::cout << e.trial_id << ' ' << e.status << ' ' << e.csv_path << '\n';
                bad += e.status != "ok";
            }
            return bad ? 2 : 0;
        }
        if (*bench) {
            auto spec = harness::default_bench_spec();
            if (seed)
                spec.seed = *seed;
            auto const report = harness::bench_scaling(spec, clients, rounds, levels);
            auto const csv = harness::format_scaling_csv(report);
            if (bench_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(bench_out, std::ios::binary);
                out << csv;
            }
            return 0;
        }
    } catch (ConfigError const& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (ParseError const& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
