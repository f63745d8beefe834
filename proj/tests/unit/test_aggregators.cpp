#include <cmath>

#include "byzfl/aggregators/aggregators.hpp"
#include "byzfl/aggregators/transforms.hpp"
#include "byzfl/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace byzfl;
using namespace byzfl::agg;
using num::Matrix;
using num::ParamVector;
using num::UpdateSet;

namespace {
UpdateSet rows(std::vector<std::vector<double>> const& r) { return UpdateSet::from_rows(r); }

UpdateSet random_set(std::size_t n, std::size_t d, std::uint64_t seed) {
    auto rng = num::RngStream::root(seed);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n * d; ++i)
        m.data()[i] = rng.normal();
    return UpdateSet(std::move(m));
}

void check_close(ParamVector const& a, std::vector<double> const& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= tol);
}
}  // namespace

TEST_SUITE("aggregators") {
    TEST_CASE("mean") {
        CHECK(agg_mean(rows({{0, 0}, {2, 2}})) == ParamVector{1, 1});
        CHECK(agg_mean(rows({{3, -1}})) == ParamVector{3, -1});
    }

    TEST_CASE("median") {
        CHECK(agg_median(rows({{1}, {5}, {3}})) == ParamVector{3});
        CHECK(agg_median(rows({{1}, {2}, {3}, {100}})) == ParamVector{2.5});
        auto u = random_set(50, 10, 1);
        CHECK(agg_median(u).values() == oracle::sort_median(oracle::to_rows(u.matrix())));
    }

    TEST_CASE("trimmed mean") {
        CHECK(agg_trimmed_mean(rows({{1}, {2}, {3}, {4}, {100}}), 1) == ParamVector{3});
        auto u = random_set(9, 4, 2);
        // sorted-order sum, so b=0 matches the mean only up to rounding
        check_close(agg_trimmed_mean(u, 0), agg_mean(u).values(), 1e-15);
        CHECK(agg_trimmed_mean(u, 3).values() == oracle::sort_trimmed_mean(oracle::to_rows(u.matrix()), 3));
        CHECK_THROWS_AS(agg_trimmed_mean(rows({{1}, {2}}), 1), ConfigError);
    }

    TEST_CASE("geomed") {
        check_close(agg_geomed(rows({{1}, {2}, {100}})), {2.0}, 1e-5);
        check_close(agg_geomed(rows({{0, 0}, {0, 2}, {2, 0}, {2, 2}})), {1.0, 1.0}, 1e-6);
    }

    TEST_CASE("geomed subgradient vanishes at the output") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto u = random_set(10, 3, 100 + seed);
            auto v = agg_geomed(u);
            // On a data point the subdifferential is R + unit ball, so the
            // smallest subgradient has norm max(0, |R| - 1).
            std::vector<double> g(3, 0.0);
            bool on_point = false;
            for (std::size_t i = 0; i < 10; ++i) {
                double const dist = num::distance(v, u.row(i));
                if (dist == 0.0) {
                    on_point = true;
                    continue;
                }
                for (std::size_t j = 0; j < 3; ++j)
                    g[j] += (v[j] - u.row(i)[j]) / dist;
            }
            double const norm = num::l2_norm(g);
            CHECK((on_point ? std::max(0.0, norm - 1.0) : norm) <= 1e-4);
        }
    }

    TEST_CASE("krum") {
        CHECK(agg_krum(rows({{0}, {0}, {0}, {10}}), 1) == ParamVector{0});
        CHECK(agg_krum(rows({{1, 2}, {1, 2}, {1, 2}}), 0) == ParamVector{1, 2});
        CHECK_THROWS_AS(agg_krum(rows({{1}}), 0), ConfigError);
        auto u = random_set(8, 4, 3);
        auto got = krum_scores(u, 2);
        auto want = oracle::brute_krum(oracle::to_rows(u.matrix()), 2);
        CHECK(got.selected == want.selected);
        for (std::size_t i = 0; i < 8; ++i)
            CHECK(got.scores[i] == doctest::Approx(want.scores[i]).epsilon(1e-12));
    }

    TEST_CASE("centered clipping") {
        auto u = random_set(6, 3, 4);
        auto zero = ParamVector(3);
        check_close(agg_cc(u, 1e12, 1, zero), agg_mean(u).values(), 1e-14);
        auto same = rows({{1, 2}, {1, 2}, {1, 2}});
        check_close(agg_cc(same, 0.5, 200, ParamVector{-3, 7}), {1, 2}, 1e-9);
    }

    TEST_CASE("dnc") {
        std::vector<std::vector<double>> r(9, {1, 2, 3, 4});
        r.push_back({1e6, -1e6, 1e6, 1e6});
        auto u = rows(r);
        auto rng = num::RngStream::root(5);
        auto res = dnc_select(u, 1, 4, 1.0, 1, rng);
        CHECK(std::find(res.kept.begin(), res.kept.end(), 9u) == res.kept.end());
        CHECK(res.v == ParamVector{1, 2, 3, 4});
        auto v = random_set(7, 5, 6);
        check_close(agg_dnc(v, 1, 5, 1.0, 0, rng), agg_mean(v).values(), 1e-14);
        CHECK_THROWS_AS(agg_dnc(rows({{1}, {2}}), 1, 1, 1.0, 2, rng), ConfigError);
    }

    TEST_CASE("average linkage matches brute force") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            auto u = random_set(3 + seed % 8, 3, 200 + seed);
            std::size_t const n = u.size();
            Matrix dist(n, n);
            oracle::Rows drows(n, std::vector<double>(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    drows[i][j] = dist(i, j) = num::distance(u.row(i), u.row(j));
            CHECK(average_linkage_two_clusters(dist) == oracle::brute_average_linkage(drows));
        }
    }

    TEST_CASE("clipped clustering") {
        auto c = clipped_clustering_select(rows({{1, 0}, {0, 2}, {9, 0}}));
        CHECK(c.tau == 2.0);
        std::vector<std::vector<double>> r;
        for (int i = 0; i < 6; ++i)
            r.push_back({1.0 + 0.01 * i, 1.0});
        for (int i = 0; i < 4; ++i)
            r.push_back({-1.0, -1.0 - 0.01 * i});
        auto res = clipped_clustering_select(rows(r));
        CHECK(res.selected == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
        CHECK(agg_clipped_clustering(rows({{2, 3}, {2, 3}, {2, 3}})) == ParamVector{2, 3});
    }

    TEST_CASE("signguard") {
        auto rng = num::RngStream::root(7);
        std::vector<std::vector<double>> r;
        auto g = num::RngStream::root(8);
        for (int i = 0; i < 7; ++i) {
            std::vector<double> row;
            for (int j = 0; j < 40; ++j)
                row.push_back(1.0 + 0.3 * g.normal());
            r.push_back(row);
        }
        auto big = r[0];
        for (double& x : big)
            x *= 100;
        r.push_back(big);
        for (int i = 0; i < 3; ++i) {
            auto flipped = r[static_cast<std::size_t>(i)];
            for (double& x : flipped)
                x = -x;
            r.push_back(flipped);
        }
        auto res = signguard_select(rows(r), 0.1, 3.0, 1.0, rng);
        CHECK(std::find(res.norm_kept.begin(), res.norm_kept.end(), 7u) == res.norm_kept.end());
        CHECK(res.kept == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
        CHECK(!res.fell_back);
        CHECK(agg_signguard(rows({{1, -1}, {1, -1}, {1, -1}}), 0.1, 3.0, 0.5, rng) == ParamVector{1, -1});
    }

    TEST_CASE("bucketing") {
        auto rng = num::RngStream::root(9);
        auto u = random_set(4, 3, 10);
        auto b = make_buckets(u, 2, rng);
        CHECK(b.size() == 2);
        AggregatorConfig med;
        med.kind = AggKind::median;
        check_close(bucketing_wrap(u, 4, med, rng), agg_mean(u).values(), 1e-14);
        auto odd = random_set(5, 2, 11);
        CHECK(bucketing_wrap(odd, 1, med, rng) == agg_median(odd));
    }

    TEST_CASE("clip update") {
        auto c = clip_update(ParamVector{6, 8}, 5.0);
        CHECK(c[0] == doctest::Approx(3.0));
        CHECK(num::l2_norm(c) <= 5.0);
        CHECK(clip_update(ParamVector{0, 3}, 5.0) == ParamVector{0, 3});
        CHECK(clip_update(ParamVector{0, 0}, 5.0) == ParamVector{0, 0});
        CHECK_THROWS_AS(clip_update(ParamVector{1}, 0.0), ParameterError);
    }

    TEST_CASE("dp sigma") {
        DpConfig dp{1.0, 1e-5, 1.0, 64};
        CHECK(dp_sigma(dp) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(1.25e5)) / 64.0).epsilon(1e-14));
        dp.epsilon = 1e300;
        auto rng = num::RngStream::root(1);
        CHECK(dp_noise(ParamVector{1, 2}, dp, rng)[1] == doctest::Approx(2.0));
        TransformConfig bad;
        bad.clip_tau = 2.0;
        bad.dp = DpConfig{};
        CHECK_THROWS_AS(validate(bad), ConfigError);
        bad.clip_tau = 0.5;
        bad.dp->delta = 1.0;
        CHECK_THROWS_AS(validate(bad), ConfigError);
    }

    TEST_CASE("names and dispatch") {
        CHECK(parse_agg_kind("TrimmedMean") == AggKind::trimmed_mean);
        CHECK(parse_agg_kind("CenteredClipping") == AggKind::cc);
        CHECK(parse_agg_kind("ClippedClustering") == AggKind::clipped_clustering);
        CHECK_THROWS_AS(parse_agg_kind("avg"), ConfigError);
        auto u = random_set(11, 4, 12);
        auto rng = num::RngStream::root(1);
        for (auto k : all_aggregators()) {
            CAPTURE(to_string(k));
            AggregatorConfig cfg;
            cfg.kind = k;
            cfg.trim_b = 2;
            auto v = aggregate(u, cfg, rng, {{}, 2, nullptr});
            CHECK(v.size() == 4);
            CHECK(v.all_finite());
        }
    }

    TEST_CASE("historical norm mode grows the history") {
        std::vector<double> history;
        AggregatorConfig cfg;
        cfg.kind = AggKind::clipped_clustering;
        cfg.cluster_historical_norm = true;
        auto rng = num::RngStream::root(1);
        aggregate(random_set(5, 3, 13), cfg, rng, {{}, 0, &history});
        aggregate(random_set(5, 3, 14), cfg, rng, {{}, 0, &history});
        CHECK(history.size() == 10);
    }
}
