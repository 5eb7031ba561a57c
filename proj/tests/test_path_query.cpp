#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <thread>

#include "capg/codec.hpp"
#include "capg/paths.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/util.hpp"

using namespace capg;

namespace {

AttackPositionsGraph fig2_graph() {
    const InfraModel model = load_infra(testing::read_fixture("fig2.json"));
    const auto records = parse_capg(testing::read_fixture("records.json")).records;
    return build_graph(model, records).graph;
}

}  // namespace

TEST_CASE("reachable: scenario graph") {
    const AttackPositionsGraph graph = fig2_graph();

    CHECK(reachable(graph, AttackPosition::external_position()).size() == 5);

    const auto from_sink = reachable(graph, AttackPosition::at("m1", "u-bitbkt-m1"));
    CHECK(from_sink == std::set<AttackPosition>{AttackPosition::at("m1", "u-bitbkt-m1")});

    const auto from_root = reachable(graph, AttackPosition::at("m0", "root"));
    CHECK(from_root.size() == 3);

    CHECK_THROWS_AS(reachable(graph, AttackPosition::at("m9", "nobody")), CapgError);
}

TEST_CASE("reachable: singleton graph reaches itself") {
    AttackPositionsGraph graph;
    graph.nodes.insert(AttackPosition::external_position());
    graph.entries.insert(AttackPosition::external_position());
    CHECK(reachable(graph, AttackPosition::external_position()) ==
          std::set<AttackPosition>{AttackPosition::external_position()});
}

TEST_CASE("enumerate_paths: exactly one four-step path crosses the scenario") {
    const AttackPositionsGraph graph = fig2_graph();
    const auto paths = enumerate_paths(graph, AttackPosition::at("m1", "u-bitbkt-m1"), 10);
    REQUIRE(paths.size() == 1);
    const AttackPath& path = paths[0];
    CHECK(path.length() == 4);
    CHECK(path.origin == AttackPosition::external_position());
    CHECK(label_text(path.edges[0].label) == "CVE-2021-44228");
    CHECK(label_text(path.edges[1].label) == "CVE-2021-38648");
    CHECK(label_text(path.edges[2].label) == "credentials");
    CHECK(label_text(path.edges[3].label) == "CVE-2022-36804");

    // chaining: each edge starts where the previous one landed
    for (std::size_t i = 1; i < path.edges.size(); ++i) {
        CHECK(path.edges[i].source == path.edges[i - 1].destination);
    }
}

TEST_CASE("enumerate_paths: an entry target yields one empty path") {
    const AttackPositionsGraph graph = fig2_graph();
    const auto paths = enumerate_paths(graph, AttackPosition::external_position(), 10);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].length() == 0);
    CHECK(paths[0].origin == AttackPosition::external_position());
}

TEST_CASE("enumerate_paths: max_len cuts long paths, bad inputs throw") {
    const AttackPositionsGraph graph = fig2_graph();
    CHECK(enumerate_paths(graph, AttackPosition::at("m1", "u-bitbkt-m1"), 3).empty());
    CHECK_THROWS_AS(enumerate_paths(graph, AttackPosition::at("m1", "u-bitbkt-m1"), 0), CapgError);
    CHECK_THROWS_AS(enumerate_paths(graph, AttackPosition::at("m9", "x"), 5), CapgError);
}

TEST_CASE("enumerate_paths equals exhaustive search on random graphs") {
    testing::Rng rng(24601);
    for (int i = 0; i < 200; ++i) {
        const AttackPositionsGraph graph = testing::random_graph(rng);
        const AttackPosition target =
            *std::next(graph.nodes.begin(), rng.range(0, static_cast<int>(graph.nodes.size()) - 1));
        const std::size_t max_len = static_cast<std::size_t>(rng.range(1, 12));

        const auto paths = enumerate_paths(graph, target, max_len);
        std::multiset<std::string> actual;
        for (const AttackPath& path : paths) {
            actual.insert(testing::oracle_path_signature(path));

            // every returned path re-validates
            CHECK(path.length() <= max_len);
            CHECK(graph.entries.count(path.origin));
            std::set<AttackPosition> seen{path.origin};
            AttackPosition current = path.origin;
            for (const Edge& edge : path.edges) {
                CHECK(edge.source == current);
                CHECK(graph.edges.count(edge));
                CHECK(seen.insert(edge.destination).second);  // simple
                current = edge.destination;
            }
            CHECK(current == target);
        }

        const auto expected = testing::oracle_all_simple_paths(graph, target, max_len);
        REQUIRE(actual == expected);

        // deterministic order: lengths never decrease
        for (std::size_t k = 1; k < paths.size(); ++k) {
            CHECK(paths[k - 1].length() <= paths[k].length());
        }
    }
}

TEST_CASE("shortest_path: scenario length and unreachable targets") {
    const AttackPositionsGraph graph = fig2_graph();
    const AttackPath path = shortest_path(graph, AttackPosition::at("m1", "u-bitbkt-m1"));
    CHECK(path.length() == 4);

    AttackPositionsGraph with_island = graph;
    with_island.nodes.insert(AttackPosition::at("m1", "island"));
    with_island.display_names[AttackPosition::at("m1", "island")] = "island";
    CHECK_THROWS_AS(shortest_path(with_island, AttackPosition::at("m1", "island")), CapgError);
}

TEST_CASE("shortest_path matches the minimum over enumerate_paths on random graphs") {
    testing::Rng rng(460);
    for (int i = 0; i < 120; ++i) {
        const AttackPositionsGraph graph = testing::random_graph(rng);
        const AttackPosition target =
            *std::next(graph.nodes.begin(), rng.range(0, static_cast<int>(graph.nodes.size()) - 1));
        const auto all = enumerate_paths(graph, target, graph.nodes.size());
        if (all.empty()) {
            CHECK_THROWS_AS(shortest_path(graph, target), CapgError);
            continue;
        }
        const AttackPath best = shortest_path(graph, target);
        CHECK(best.length() == all.front().length());
        CHECK(testing::oracle_path_signature(best) ==
              testing::oracle_path_signature(all.front()));
    }
}

TEST_CASE("rank_paths: severity ranking with scores, length fallback without") {
    const AttackPositionsGraph graph = fig2_graph();
    auto paths = enumerate_paths(graph, AttackPosition::at("m0", "root"), 10);
    REQUIRE(paths.size() == 1);

    const std::map<CveId, double> scores = {
        {*CveId::parse("2021-44228"), 10.0},
        {*CveId::parse("2021-38648"), 7.8},
        {*CveId::parse("2022-36804"), 8.8},
    };
    const auto ranked = rank_paths(paths, RankKey::severity, scores);
    REQUIRE(ranked.size() == 1);
    REQUIRE(ranked[0].severity_sum.has_value());
    CHECK(*ranked[0].severity_sum == doctest::Approx(17.8));

    const auto unranked = rank_paths(paths, RankKey::severity, {});
    CHECK_FALSE(unranked[0].severity_sum.has_value());
}

TEST_CASE("rank_paths: severity descends, ties break by length") {
    testing::Rng rng(3111);
    std::map<CveId, double> scores;
    for (const std::string& cve : testing::cve_pool()) {
        scores[*CveId::parse(cve)] = rng.range(10, 100) / 10.0;
    }
    for (int i = 0; i < 40; ++i) {
        const AttackPositionsGraph graph = testing::random_graph(rng);
        const AttackPosition target =
            *std::next(graph.nodes.begin(), rng.range(0, static_cast<int>(graph.nodes.size()) - 1));
        auto paths = enumerate_paths(graph, target, 8);
        const auto ranked = rank_paths(paths, RankKey::severity, scores);
        for (std::size_t k = 1; k < ranked.size(); ++k) {
            const double prev = ranked[k - 1].severity_sum.value_or(0.0);
            const double next = ranked[k].severity_sum.value_or(0.0);
            CHECK(prev >= next);
            if (prev == next) {
                CHECK(ranked[k - 1].length() <= ranked[k].length());
            }
        }
    }
}

TEST_CASE("export_dot: the scenario rendering") {
    const AttackPositionsGraph graph = fig2_graph();
    const std::string dot = export_dot(graph);
    CHECK(dot.rfind("digraph attack_positions {", 0) == 0);
    CHECK(dot.find("\"attacker@internet\";") != std::string::npos);
    CHECK(dot.find("\"u-tomcat@m0\" -> \"root@m0\" [label=\"CVE-2021-38648\"];") !=
          std::string::npos);
    CHECK(dot.find("\"root@m0\" -> \"u-bitbkt@m0\" [label=\"credentials\"];") !=
          std::string::npos);
    CHECK(dot.back() == '\n');

    AttackPositionsGraph empty;
    CHECK(export_dot(empty) == "digraph attack_positions {\n}\n");
}

TEST_CASE("graph JSON: import after export is the identity on random graphs") {
    testing::Rng rng(55888);
    for (int i = 0; i < 100; ++i) {
        const AttackPositionsGraph graph = testing::random_graph(rng);
        const std::string text = export_json(graph);
        const AttackPositionsGraph back = import_json(text);
        REQUIRE(back == graph);
        CHECK(export_json(back) == text);
    }
    CHECK_THROWS_AS(import_json("not json"), CapgError);
    CHECK_THROWS_AS(import_json(R"({"format_version": "1", "nodes": [],
        "edges": [{"source": {"external": true}, "destination": {"external": true},
                   "label": {"type": "credentials"}}]})"),
                    CapgError);
}

TEST_CASE("exports are byte-deterministic") {
    const AttackPositionsGraph graph = fig2_graph();
    CHECK(export_dot(graph) == export_dot(graph));
    CHECK(export_json(graph) == export_json(graph));
}

TEST_CASE("a shared graph serves concurrent readers") {
    const AttackPositionsGraph graph = fig2_graph();
    const std::string expected_dot = export_dot(graph);
    const std::size_t expected_reach =
        reachable(graph, AttackPosition::external_position()).size();

    std::vector<std::thread> readers;
    std::array<bool, 8> ok{};
    for (std::size_t t = 0; t < ok.size(); ++t) {
        readers.emplace_back([&, t] {
            bool good = true;
            for (int i = 0; i < 50; ++i) {
                good &= export_dot(graph) == expected_dot;
                good &= reachable(graph, AttackPosition::external_position()).size() ==
                        expected_reach;
                good &= enumerate_paths(graph, AttackPosition::at("m1", "u-bitbkt-m1"), 10)
                            .size() == 1;
            }
            ok[t] = good;
        });
    }
    for (std::thread& reader : readers) reader.join();
    for (bool good : ok) CHECK(good);
}
