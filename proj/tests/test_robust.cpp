#include <doctest.h>

#include <cmath>
#include <random>

#include "secgame/errors.hpp"
#include "secgame/modelio.hpp"
#include "secgame/robust.hpp"
#include "test_support.hpp"

using namespace secgame;
using namespace secgame::testing;

namespace {

GameConfig uniform_config(int n, double ga, double gd) {
    GameConfig config;
    config.n = n;
    config.level_count_attacker = 2;
    config.level_count_defender = 2;
    config.gamma_a.assign(n, ga);
    config.gamma_d.assign(n, gd);
    return config;
}

ModelSet fixture_set() {
    return load_model_set(fixture_path("three_node_set.json"));
}

}  // namespace

TEST_CASE("model set validation") {
    auto set = fixture_set();
    CHECK(set.size() == 3);
    CHECK(set.phi == std::vector<double>(3, 1.0 / 3.0));

    SUBCASE("mismatched B is rejected") {
        set.models[1].B(0, 0) += 0.5;
        CHECK_THROWS_AS(validate_model_set(set), ValidationError);
    }

    SUBCASE("weights must sum to one") {
        set.phi = {0.5, 0.2, 0.2};
        CHECK_THROWS_AS(validate_model_set(set), WeightSumMismatchError);
    }
}

TEST_CASE("evaluate_strategy identities") {
    const auto set = fixture_set();
    const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    const auto config = uniform_config(3, 0.6, 1.2);

    const Action zero{std::vector<double>(3, 0.0), 0.0};
    CHECK(evaluate_strategy(zero, zero, tables.per_model[1]) == 0.0);

    const auto own = solve_cbbi(config, tables.per_model[1]);
    CHECK(evaluate_strategy(own.attacker_strategy, own.defender_strategy,
                            tables.per_model[1]) ==
          doctest::Approx(own.attacker_payoff).epsilon(1e-15));
}

TEST_CASE("average payoff paths agree (sum re-association)") {
    const auto set = fixture_set();
    const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);

    std::mt19937 rng(61);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Action a, d;
        for (int k = 0; k < 3; ++k) {
            a.levels.push_back(dist(rng));
            d.levels.push_back(dist(rng));
        }
        double direct = 0.0;  // expectation over per-model payoffs
        for (int j = 0; j < set.size(); ++j)
            direct += set.phi[j] * payoff_attacker(a, d, tables.per_model[j]);
        const double pooled = payoff_attacker(a, d, tables.expected);
        CHECK(direct == doctest::Approx(pooled).epsilon(1e-12));
    }
}

TEST_CASE("nominal mismatch identities") {
    const auto set = fixture_set();
    const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    const auto config = uniform_config(3, 0.6, 1.2);

    CHECK(nominal_mismatch(tables, config, 0, 0) == 0.0);
    CHECK(nominal_mismatch(tables, config, 1, 0) >= 0.0);
}

TEST_CASE("degenerate denominator is reported, not silently zero") {
    const auto set = fixture_set();
    const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    // Cheap defense drives every per-model equilibrium payoff to zero.
    const auto config = uniform_config(3, 0.6, 0.2);
    CHECK_THROWS_AS(nominal_mismatch(tables, config, 1, 0),
                    DegenerateDenominatorError);
}

TEST_CASE("average game on degenerate sets") {
    const auto config = uniform_config(3, 0.6, 1.2);

    SUBCASE("singleton set equals the single-model game") {
        auto set = fixture_set();
        set.models.resize(1);
        set.phi = {1.0};
        const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
        const auto avg = solve_average_game(tables, config);
        const auto single = solve_cbbi(config, tables.per_model[0]);
        CHECK(avg.attacker_payoff == doctest::Approx(single.attacker_payoff).epsilon(1e-12));
        CHECK(avg.attacker_strategy.levels == single.attacker_strategy.levels);
        CHECK(avg.defender_strategy.levels == single.defender_strategy.levels);
    }

    SUBCASE("duplicated models equal the single-model game") {
        const auto set = load_model_set(fixture_path("duplicated_set.json"));
        const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
        const auto avg = solve_average_game(tables, config);
        const auto single = solve_cbbi(config, tables.per_model[0]);
        CHECK(avg.attacker_payoff ==
              doctest::Approx(single.attacker_payoff).epsilon(1e-12));
        CHECK(average_mismatch(tables, config, 0) ==
              doctest::Approx(0.0).epsilon(1e-9));
        CHECK(average_mismatch(tables, config, 1) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("mismatch statistics aggregation") {
    const auto set = fixture_set();
    const auto tables = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    const std::vector<std::pair<double, double>> grid = {{0.6, 1.2}, {0.5, 1.5}};
    const auto report =
        mismatch_statistics(tables, grid, uniform_config(3, 0.6, 1.2), 0);

    CHECK(report.nominal.min >= 0.0);
    CHECK(report.average.min >= 0.0);
    // The nominal game matches the nominal model at every cost pair.
    CHECK(report.nominal.min == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(report.nominal.values.size() == report.average.values.size());
    CHECK(report.nominal.q1 <= report.nominal.median);
    CHECK(report.nominal.median <= report.nominal.q3);
}

TEST_CASE("mismatch statistics invariant to model ordering") {
    auto set = fixture_set();
    const std::vector<std::pair<double, double>> grid = {{0.6, 1.2}};
    const auto base = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    const auto report_a =
        mismatch_statistics(base, grid, uniform_config(3, 0.6, 1.2), 0);

    std::swap(set.models[1], set.models[2]);
    const auto swapped = build_model_set_tables(set, MaskMode::FullNode, {}, 2);
    const auto report_b =
        mismatch_statistics(swapped, grid, uniform_config(3, 0.6, 1.2), 0);

    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto va = sorted(report_a.nominal.values);
    const auto vb = sorted(report_b.nominal.values);
    REQUIRE(va.size() == vb.size());
    for (std::size_t i = 0; i < va.size(); ++i)
        CHECK(va[i] == doctest::Approx(vb[i]).epsilon(1e-9));
}

TEST_CASE("controller mismatch diagnostics") {
    const auto set = fixture_set();
    CHECK(controller_mismatch(set, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(controller_mismatch(set, 1) >= -1e-9);

    const auto dup = load_model_set(fixture_path("duplicated_set.json"));
    CHECK(controller_mismatch(dup, 1) == doctest::Approx(0.0).epsilon(1e-9));
}
