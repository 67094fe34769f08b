#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "secgame/errors.hpp"
#include "secgame/lossmap.hpp"
#include "secgame/modelio.hpp"
#include "test_support.hpp"

using namespace secgame;
using namespace secgame::testing;

TEST_CASE("pattern index encoding is LSB-first") {
    CHECK(pattern_from_index(0, 3).bits == std::vector<int>{0, 0, 0});
    CHECK(pattern_from_index(6, 3).bits == std::vector<int>{0, 1, 1});
    CHECK(pattern_to_index({0, 1, 1}) == 6);

    const auto two = enumerate_patterns(2);
    REQUIRE(two.size() == 4);
    CHECK(two[0].bits == std::vector<int>{0, 0});
    CHECK(two[1].bits == std::vector<int>{1, 0});
    CHECK(two[2].bits == std::vector<int>{0, 1});
    CHECK(two[3].bits == std::vector<int>{1, 1});
}

TEST_CASE("pattern index bijection over all patterns") {
    for (std::uint32_t idx = 0; idx < (1u << 5); ++idx)
        CHECK(pattern_to_index(pattern_from_index(idx, 5).bits) == idx);
}

TEST_CASE("enumerate_patterns respects the cap") {
    CHECK(enumerate_patterns(1).size() == 2);
    CHECK(enumerate_patterns(16).size() == 65536);
    CHECK_THROWS_AS(enumerate_patterns(17), CapExceededError);
    CHECK_THROWS_AS(enumerate_patterns(5, 4), CapExceededError);
}

TEST_CASE("scalar loss table") {
    const auto model = scalar_model();
    const auto table = build_loss_table(model, MaskMode::FullNode);
    REQUIRE(table.n == 1);
    REQUIRE(table.entries.size() == 2);

    const double k_opt = std::sqrt(2.0) - 1.0;
    CHECK(table.J_opt == doctest::Approx(k_opt).epsilon(1e-6));
    // delta at s0 is the open-loop loss 0.5 - (sqrt(2)-1).
    CHECK(table.delta(0) == doctest::Approx(0.5 - k_opt).epsilon(1e-6));
    CHECK(table.delta(1) == 0.0);
}

TEST_CASE("loss table deltas are nonnegative and dominance-monotone") {
    std::mt19937 rng(3);
    const auto model = random_model(rng, 6, 3, 3);
    const auto table = build_loss_table(model, MaskMode::FullNode, {}, 2);

    const double J_ol = h2_cost(model, Eigen::MatrixXd::Zero(3, 6));
    CHECK(table.delta(0) ==
          doctest::Approx(J_ol - table.J_opt).epsilon(1e-6));

    for (std::uint32_t s = 0; s < 8; ++s) {
        CHECK(table.delta(s) >= 0.0);
        for (std::uint32_t t = 0; t < 8; ++t) {
            // s <= t entrywise: losing fewer nodes never increases the loss.
            if ((s & t) == s)
                CHECK(table.delta(s) >=
                      table.delta(t) - 1e-6 * (1.0 + table.delta(t)));
        }
    }
}

TEST_CASE("importance ranking ordering and tie-break") {
    LossTable table;
    table.n = 2;
    table.entries.resize(4);
    table.entries[1].delta = 0.3;  // only node 2 attacked... pattern (1,0)
    table.entries[2].delta = 0.1;  // pattern (0,1): only node 1 attacked
    CHECK(importance_ranking(table) == std::vector<int>{2, 1});

    table.entries[1].delta = 0.1;
    CHECK(importance_ranking(table) == std::vector<int>{1, 2});
}

TEST_CASE("expected loss table combines per-model tables") {
    std::mt19937 rng(9);
    auto model_a = random_model(rng, 4, 2, 2);
    auto model_b = model_a;
    model_b.A *= 1.1;

    const auto ta = build_loss_table(model_a, MaskMode::FullNode);
    const auto tb = build_loss_table(model_b, MaskMode::FullNode);

    SUBCASE("single model is the identity") {
        const auto e = expected_loss_table({ta}, {1.0});
        for (std::size_t i = 0; i < e.entries.size(); ++i)
            CHECK(e.entries[i].delta == ta.entries[i].delta);
    }

    SUBCASE("identical duplicates equal the single table") {
        const auto e = expected_loss_table({ta, ta}, {0.5, 0.5});
        for (std::size_t i = 0; i < e.entries.size(); ++i)
            CHECK(e.entries[i].delta ==
                  doctest::Approx(ta.entries[i].delta).epsilon(1e-15));
    }

    SUBCASE("weighted sum and linearity in phi") {
        const auto e = expected_loss_table({ta, tb}, {0.3, 0.7});
        for (std::size_t i = 0; i < e.entries.size(); ++i)
            CHECK(e.entries[i].delta ==
                  doctest::Approx(0.3 * ta.entries[i].delta +
                                  0.7 * tb.entries[i].delta)
                      .epsilon(1e-14));

        const auto e1 = expected_loss_table({ta, tb}, {0.2, 0.8});
        const auto e2 = expected_loss_table({ta, tb}, {0.6, 0.4});
        const auto mid = expected_loss_table({ta, tb}, {0.4, 0.6});
        for (std::size_t i = 0; i < mid.entries.size(); ++i)
            CHECK(mid.entries[i].delta ==
                  doctest::Approx(0.5 * e1.entries[i].delta +
                                  0.5 * e2.entries[i].delta)
                      .epsilon(1e-12));
    }

    SUBCASE("weight sum must be 1") {
        CHECK_THROWS_AS(expected_loss_table({ta, tb}, {0.3, 0.6}),
                        WeightSumMismatchError);
    }
}

TEST_CASE("loss table parallel build is deterministic") {
    std::mt19937 rng(15);
    const auto model = random_model(rng, 4, 2, 2);
    const auto serial = build_loss_table(model, MaskMode::FullNode, {}, 1);
    const auto parallel = build_loss_table(model, MaskMode::FullNode, {}, 4);
    REQUIRE(serial.entries.size() == parallel.entries.size());
    for (std::size_t i = 0; i < serial.entries.size(); ++i) {
        CHECK(serial.entries[i].J == parallel.entries[i].J);
        CHECK(serial.entries[i].delta == parallel.entries[i].delta);
    }
}

TEST_CASE("cache round-trip is bit-exact") {
    std::mt19937 rng(21);
    const auto model = random_model(rng, 4, 2, 2);
    const auto table = build_loss_table(model, MaskMode::InterNodeOnly);

    const auto path = std::filesystem::temp_directory_path() /
                      "secgame_losstable_test.json";
    save_loss_table(table, path);
    const auto loaded = load_loss_table(path, table.model_hash);
    CHECK(loaded.J_opt == table.J_opt);
    CHECK(loaded.mode == table.mode);
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        CHECK(loaded.entries[i].J == table.entries[i].J);
        CHECK(loaded.entries[i].delta == table.entries[i].delta);
        CHECK(loaded.entries[i].converged == table.entries[i].converged);
    }

    CHECK_THROWS_AS(load_loss_table(path, std::string("deadbeef")),
                    HashMismatchError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_loss_table(path), ParseError);
}

TEST_CASE("content hash is sensitive to model and mode") {
    std::mt19937 rng(33);
    const auto model = random_model(rng, 3, 2, 1);
    auto edited = model;
    edited.A(0, 0) += 1e-12;
    const SynthOptions opts;
    CHECK(model_content_hash(model, MaskMode::FullNode, opts) !=
          model_content_hash(edited, MaskMode::FullNode, opts));
    CHECK(model_content_hash(model, MaskMode::FullNode, opts) !=
          model_content_hash(model, MaskMode::InterNodeOnly, opts));
    CHECK(model_content_hash(model, MaskMode::FullNode, opts) ==
          model_content_hash(model, MaskMode::FullNode, opts));
}
