#include <cmath>

#include "byzfl/attacks/attacks.hpp"
#include "byzfl/error.hpp"
#include "doctest.h"

using namespace byzfl;
using namespace byzfl::attacks;
using num::Matrix;
using num::ParamVector;
using num::UpdateSet;

namespace {
UpdateSet with_malicious(std::vector<std::vector<double>> const& rows, std::size_t m) {
    std::vector<bool> byz(rows.size());
    std::vector<std::size_t> ids(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        byz[i] = i < m;
        ids[i] = i;
    }
    return UpdateSet(Matrix::from_rows(rows), byz, ids);
}
}  // namespace

TEST_SUITE("attacks") {
    TEST_CASE("label flip") {
        CHECK(flip_label(3, 10) == 6);
        CHECK(flip_label(0, 10) == 9);
        CHECK_THROWS_AS(flip_label(10, 10), DataError);
    }

    TEST_CASE("sign flip") { CHECK(sign_flip({1, -2, 0}) == ParamVector{-1, 2, -0.0}); }

    TEST_CASE("noise") {
        auto rng = num::RngStream::root(1);
        CHECK(noise_update(4, 0.0, rng) == ParamVector(4));
        double const n = num::l2_norm(noise_update(10000, 1e3, rng));
        CHECK(std::abs(n - 1e5) <= 0.05 * 1e5);
    }

    TEST_CASE("alie formula") {
        auto u = with_malicious({{0}, {1}, {2}, {3}}, 1);
        AdversaryView view(u, 0, num::RngStream::root(1));
        auto cfg = AttackConfig::defaults_for(AttackKind::alie);
        cfg.alie.z_max = 0.5;
        alie_updates(view, cfg);
        CHECK(u.row(0)[0] == doctest::Approx(2.5));

        auto same = with_malicious({{9, 9}, {1, 4}, {1, 4}, {1, 4}}, 1);
        AdversaryView v2(same, 0, num::RngStream::root(1));
        alie_updates(v2, cfg);
        CHECK(same.row(0)[0] == 1.0);
        CHECK(same.row(0)[1] == 4.0);
    }

    TEST_CASE("alie auto z") {
        // n = 10, M = 3: s = 6 - 3 = 3, z = Phi^-1(0.7)
        AlieParams p;
        p.auto_z = true;
        CHECK(alie_z(10, 3, p) == doctest::Approx(0.5244005127080407));
    }

    TEST_CASE("omniscient attacks need two benign rows") {
        auto plan = make_attack(AttackConfig::defaults_for(AttackKind::alie), 2);
        REQUIRE(plan.adversary);
        CHECK_THROWS_AS(plan.adversary->on_algorithm_begin({3, 2, 2, 4}), ConfigError);
        CHECK_NOTHROW(plan.adversary->on_algorithm_begin({4, 2, 2, 4}));
    }

    TEST_CASE("ipm") {
        std::vector<std::vector<double>> rows(9, {1.0, -2.0});
        auto u = with_malicious(rows, 1);
        AdversaryView view(u, 0, num::RngStream::root(1));
        auto cfg = AttackConfig::defaults_for(AttackKind::ipm);
        cfg.ipm_epsilon = 0.1;
        ipm_updates(view, cfg);
        CHECK(u.row(0)[0] == doctest::Approx(-0.1));
        CHECK(u.row(0)[1] == doctest::Approx(0.2));
        cfg.ipm_epsilon = 0.0;
        AdversaryView v2(u, 0, num::RngStream::root(1));
        ipm_updates(v2, cfg);
        CHECK(u.row(0)[0] == 0.0);
    }

    TEST_CASE("minmax") {
        auto same = minmax_search(Matrix::from_rows({{1, 2}, {1, 2}}), {});
        CHECK(same.gamma == 0.0);
        CHECK(same.update == ParamVector{1, 2});
        MinMaxParams p;
        p.gamma_tol = 1e-6;
        auto r = minmax_search(Matrix::from_rows({{-1.0}, {1.0}}), p);
        CHECK(r.gamma >= 1.0 - 1e-6);
        CHECK(r.gamma <= 1.0);
        for (auto pert : {Perturbation::neg_std, Perturbation::neg_unit_mean, Perturbation::neg_sign}) {
            p.perturbation = pert;
            auto b = Matrix::from_rows({{1, 0, 3}, {2, 1, 1}, {0, -1, 2}});
            auto res = minmax_search(b, p);
            double diam = 0.0;
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    diam = std::max(diam, num::distance(b.row(i), b.row(j)));
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(num::distance(res.update, b.row(i)) <= diam * (1 + 1e-12));
        }
    }

    TEST_CASE("names") {
        CHECK(parse_attack_kind("ALIE") == AttackKind::alie);
        CHECK(parse_attack_kind("LabelFlip") == AttackKind::label_flip);
        CHECK_THROWS_AS(parse_attack_kind("nope"), ConfigError);
        CHECK(default_level(AttackKind::minmax) == 5);
        for (auto k : all_attacks())
            CHECK(parse_attack_kind(to_string(k)) == k);
    }

    TEST_CASE("view bookkeeping") {
        auto u = with_malicious({{1}, {2}, {3}}, 2);
        AdversaryView v(u, 4, num::RngStream::root(1));
        CHECK(v.num_malicious() == 2);
        CHECK(v.num_benign() == 1);
        CHECK(v.round() == 4);
        CHECK_THROWS_AS(v.fill_malicious(ParamVector{1, 2}), DimensionError);
        v.fill_malicious(ParamVector{7});
        CHECK(u.row(1)[0] == 7.0);
        CHECK(u.row(2)[0] == 3.0);
    }
}
