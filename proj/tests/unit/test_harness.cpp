#include <filesystem>
#include <fstream>
#include <sstream>

#include "byzfl/error.hpp"
#include "byzfl/harness/harness.hpp"
#include "doctest.h"

using namespace byzfl;
using namespace byzfl::harness;

namespace {
std::string slurp(std::filesystem::path const& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string const kSmall = R"({
  "run": "FEDSGD", "stop": {"training_round": 10}, "seed": 4,
  "config": {
    "global_model": "logistic",
    "data_config": {"samples_per_class": 40},
    "num_clients": 4,
    "server_config": {"aggregator": {"grid_search": ["mean", "median"]}}
  }})";
}  // namespace

TEST_SUITE("harness") {
    TEST_CASE("grid product") {
        auto cfg = parse_experiment(R"({"run": "FEDSGD", "config": {"num_clients": {"grid_search": [4, 5]},
            "server_config": {"aggregator": {"grid_search": ["mean", "median", "krum"]}}}})");
        auto trials = expand_grid(cfg);
        REQUIRE(trials.size() == 6);
        CHECK(trials[0].spec.num_clients == 4);
        CHECK(trials[1].spec.aggregator.kind == agg::AggKind::median);
        CHECK(trials[3].spec.num_clients == 5);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(trials[i].trial_id == i);
    }

    TEST_CASE("repetitions") {
        auto trials = expand_grid(parse_experiment(R"({"run": "FEDSGD", "repetitions": 3, "config": {}})"));
        REQUIRE(trials.size() == 3);
        CHECK(trials[2].repetition == 2);
        CHECK(trials[0].config == trials[2].config);
        CHECK(!(trials[0].spec.root_stream() == trials[1].spec.root_stream()));
    }

    TEST_CASE("nested grid inside a grid entry") {
        auto v = expand_value(json::parse(R"({"grid_search": [{"type": "a"}, {"type": "b", "x": {"grid_search": [1, 2]}}]})"));
        CHECK(v.size() == 3);
    }

    TEST_CASE("rejections carry the field path") {
        auto expect_msg = [](std::string const& text, std::string const& needle) {
            try {
                expand_grid(parse_experiment(text));
                FAIL("accepted: " << text);
            } catch (ConfigError const& e) {
                CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
            }
        };
        expect_msg(R"({"run": "FEDSGD", "config": {"bogus": 1}})", "config.bogus");
        expect_msg(R"({"run": "FEDSGD", "config": {"num_clients": "ten"}})", "config.num_clients");
        expect_msg(R"({"run": "FEDSGD", "config": {"server_config": {"aggregator": "avg"}}})", "aggregator");
        expect_msg(R"({"run": "SCAFFOLD", "config": {}})", "run");
        expect_msg(R"({"run": "FEDSGD", "config": {"num_clients": 4, "num_malicious_clients": 2,
            "malicious_majority": "reject"}})", "num_malicious_clients");
    }

    TEST_CASE("parse error line") {
        try {
            parse_experiment("{\n  \"run\": \"FEDSGD\",\n  oops\n}");
            FAIL("accepted");
        } catch (ParseError const& e) {
            CHECK(e.line() == 3);
        }
    }

    TEST_CASE("fedsgd preset is applied") {
        auto trials = expand_grid(parse_experiment(R"({"run": "FEDSGD", "config": {"client_config": {"lr": 0.3}}})"));
        CHECK(trials[0].spec.client.lr == 1.0);
    }

    TEST_CASE("seed override") {
        auto cfg = parse_experiment(kSmall);
        auto a = expand_grid(cfg, 99);
        CHECK(a[0].spec.seed == 99);
    }

    TEST_CASE("run writes csvs and a manifest, independent of parallelism") {
        auto base = std::filesystem::temp_directory_path() / "byzfl_unit_harness";
        std::filesystem::remove_all(base);
        auto cfg = parse_experiment(kSmall);
        ExperimentOptions o1;
        o1.out_dir = base / "a";
        o1.record_timing = false;
        ExperimentOptions o4 = o1;
        o4.out_dir = base / "b";
        o4.parallelism = 4;
        auto m1 = run_experiment(cfg, o1);
        auto m4 = run_experiment(cfg, o4);
        REQUIRE(m1.size() == 2);
        for (auto const& e : m1) {
            CHECK(e.status == "ok");
            auto name = std::filesystem::path(e.csv_path).filename();
            CHECK(slurp(o1.out_dir / name) == slurp(o4.out_dir / name));
        }
        auto man = json::parse(slurp(o1.out_dir / "manifest.json"));
        CHECK(man.size() == 2);
        CHECK(man[0]["status"] == "ok");
        CHECK(man[1]["config"]["config"]["server_config"]["aggregator"] == "median");
        auto csv = slurp(o1.out_dir / "trial_0000.csv");
        CHECK(csv.rfind("round,train_loss,test_acc,elapsed_s\n", 0) == 0);
        std::filesystem::remove_all(base);
    }

    TEST_CASE("diverged trial is marked in the manifest") {
        auto base = std::filesystem::temp_directory_path() / "byzfl_unit_diverge";
        std::filesystem::remove_all(base);
        auto cfg = parse_experiment(R"({
          "run": "FEDSGD", "stop": {"training_round": 300}, "seed": 4,
          "config": {
            "global_model": "linear",
            "data_config": {"samples_per_class": 40},
            "num_clients": 4, "divergence": "abort",
            "server_config": {"optimizer": {"lr": {"grid_search": [0.05, 1000]}}}
          }})");
        ExperimentOptions o;
        o.out_dir = base;
        auto m = run_experiment(cfg, o);
        REQUIRE(m.size() == 2);
        CHECK(m[0].status == "ok");
        CHECK(m[1].status == "diverged");
        std::filesystem::remove_all(base);
    }

    TEST_CASE("scaling report csv") {
        ScalingReport r;
        r.by_clients = {{16, 0.5, 0.1}};
        r.by_threads = {{1, 0.5, 0.0, 1.0}};
        r.fixed_clients = 16;
        CHECK(!format_scaling_csv(r).empty());
    }
}
