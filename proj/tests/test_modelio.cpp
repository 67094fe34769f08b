#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "secgame/errors.hpp"
#include "secgame/modelio.hpp"
#include "test_support.hpp"

using namespace secgame;
using namespace secgame::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("load_model on fixtures") {
    const auto scalar = load_model(fixture_path("scalar.json"));
    CHECK(scalar.num_states() == 1);
    CHECK(scalar.num_nodes() == 1);
    CHECK(scalar.A(0, 0) == -1.0);

    const auto three = load_model(fixture_path("three_node.json"));
    CHECK(three.num_nodes() == 3);
    CHECK(three.partition.size() == 3);
}

TEST_CASE("load_model rejects invalid manifests") {
    const auto path = temp_file("secgame_bad_model.json");

    SUBCASE("asymmetric Q") {
        std::ofstream(path) << R"({"name":"bad","dims":{"m":2,"r":1,"q":1,"n":1},
            "partition":[[2,1]],
            "A":[-1,0,0,-1],"B":[1,0],"D":[1,0],
            "Q":[1,0.5,0,1],"R":[1]})";
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("Q asymmetric"),
                             ValidationError);
    }

    SUBCASE("unstable A") {
        std::ofstream(path) << R"({"name":"bad","dims":{"m":1,"r":1,"q":1,"n":1},
            "partition":[[1,1]],
            "A":[0.1],"B":[1],"D":[1],"Q":[1],"R":[1]})";
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("not Hurwitz"),
                             ValidationError);
    }

    SUBCASE("indefinite R") {
        std::ofstream(path) << R"({"name":"bad","dims":{"m":1,"r":1,"q":1,"n":1},
            "partition":[[1,1]],
            "A":[-1],"B":[1],"D":[1],"Q":[1],"R":[-1]})";
        CHECK_THROWS_WITH_AS(load_model(path),
                             doctest::Contains("R not positive definite"),
                             ValidationError);
    }

    SUBCASE("partition sum mismatch") {
        std::ofstream(path) << R"({"name":"bad","dims":{"m":2,"r":1,"q":1,"n":1},
            "partition":[[1,1]],
            "A":[-1,0,0,-1],"B":[1,0],"D":[1,0],"Q":[1,0,0,1],"R":[1]})";
        CHECK_THROWS_AS(load_model(path), ValidationError);
    }

    SUBCASE("malformed json") {
        std::ofstream(path) << "{ not json";
        CHECK_THROWS_AS(load_model(path), ParseError);
    }

    std::filesystem::remove(path);
}

TEST_CASE("model round-trip preserves matrices exactly") {
    std::mt19937 rng(77);
    auto model = random_model(rng, 5, 2, 2);
    model.name = "roundtrip";
    const auto path = temp_file("secgame_roundtrip_model.json");
    save_model(model, path);
    const auto loaded = load_model(path);
    CHECK(loaded.A == model.A);
    CHECK(loaded.B == model.B);
    CHECK(loaded.D == model.D);
    CHECK(loaded.Q == model.Q);
    CHECK(loaded.R == model.R);
    std::filesystem::remove(path);
}

TEST_CASE("build_consensus_Q") {
    SUBCASE("n=2, m=4") {
        const NodePartition part = {{2, 1}, {2, 1}};
        const Eigen::MatrixXd Q = build_consensus_Q(part);
        REQUIRE(Q.rows() == 4);
        // Angle block is the complete-graph Laplacian 2I - 11^T.
        CHECK(Q(0, 0) == 1.0);
        CHECK(Q(0, 1) == -1.0);
        CHECK(Q(1, 0) == -1.0);
        CHECK(Q(1, 1) == 1.0);
        CHECK(Q(2, 2) == 1.0);
        CHECK(Q(3, 3) == 1.0);
        CHECK(Q(2, 3) == 0.0);
    }

    SUBCASE("n=1, m=2") {
        const Eigen::MatrixXd Q = build_consensus_Q({{2, 1}});
        CHECK(Q(0, 0) == 0.0);
        CHECK(Q(1, 1) == 1.0);
    }

    SUBCASE("Laplacian block rows sum to zero and Q is PSD") {
        const NodePartition part = {{3, 1}, {3, 1}, {2, 1}};
        const Eigen::MatrixXd Q = build_consensus_Q(part);
        CHECK(Q.topLeftCorner(3, 3).rowwise().sum().norm() == 0.0);
        CHECK((Q - Q.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }

    SUBCASE("too small partition") {
        CHECK_THROWS_AS(build_consensus_Q({{1, 1}}), ValidationError);
    }
}

TEST_CASE("consensus Q in grouped manifests is permuted consistently") {
    const auto path = temp_file("secgame_consensus_model.json");
    // Two nodes, grouped states [angle, freq] each; A stable diagonal.
    std::ofstream(path) << R"({"name":"consensus","dims":{"m":4,"r":2,"q":2,"n":2},
        "ordering":"grouped","partition":[[2,1],[2,1]],
        "A":[-1,0,0,0, 0,-1,0,0, 0,0,-1,0, 0,0,0,-1],
        "B":[1,0, 0,0, 0,1, 0,0],
        "D":[1,0, 0,0, 0,1, 0,0],
        "Q":"consensus","R":"identity"})";
    const auto model = load_model(path);
    // Grouped state order is (angle1, freq1, angle2, freq2): the Laplacian
    // couples states 0 and 2.
    CHECK(model.Q(0, 0) == 1.0);
    CHECK(model.Q(0, 2) == -1.0);
    CHECK(model.Q(2, 0) == -1.0);
    CHECK(model.Q(1, 1) == 1.0);
    CHECK(model.Q(3, 3) == 1.0);
    CHECK(model.Q(0, 1) == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("load_model_set") {
    const auto set = load_model_set(fixture_path("three_node_set.json"));
    CHECK(set.size() == 3);
    CHECK(set.nominal_index == 0);
    CHECK(set.phi == std::vector<double>(3, 1.0 / 3.0));

    const auto single = load_model_set(fixture_path("duplicated_set.json"));
    CHECK(single.size() == 2);
}
