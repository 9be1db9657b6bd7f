#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "graphdsl/graphgen.hpp"
#include "graphdsl/oracles.hpp"

using namespace graphdsl;

namespace {

CsrGraph k4() {
    std::vector<EdgeInput> edges;
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) edges.push_back({u, v, {}});
    return CsrGraph::buildFromEdges(4, edges, false);
}

CsrGraph path3() {
    return CsrGraph::buildFromEdges(3, {{0, 1, {}}, {1, 2, {}}}, false);
}

}  // namespace

TEST_CASE("oracle tc: K4 has C(4,3) triangles") { CHECK(oracles::tc(k4()) == 4); }

TEST_CASE("oracle tc: guards against large graphs") {
    CsrGraph g = CsrGraph::buildFromEdges(300, {}, false);
    CHECK_THROWS_WITH_AS(oracles::tc(g), doctest::Contains("GraphTooLarge"),
                         std::invalid_argument);
}

TEST_CASE("oracle sssp: single node") {
    CsrGraph g = CsrGraph::buildFromEdges(1, {}, true);
    auto d = oracles::sssp(g, 0);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == 0);
}

TEST_CASE("oracle sssp: weighted triangle and unreachable nodes") {
    CsrGraph g = CsrGraph::buildFromEdges(4, {{0, 1, 5}, {1, 2, 1}, {0, 2, 7}}, false);
    auto d = oracles::sssp(g, 0);
    CHECK(d[0] == 0);
    CHECK(d[1] == 5);
    CHECK(d[2] == 6);
    CHECK(d[3] == oracles::kInfiniteDistance);
}

TEST_CASE("oracle sssp: triangle-inequality fixpoint on every edge") {
    auto edges = genUniformEdges(50, 200, 17);
    CsrGraph g = CsrGraph::buildFromEdges(50, edges, false).withRandomWeights(1, 100, 17);
    auto d = oracles::sssp(g, 0);
    for (int32_t u = 0; u < g.nodeCount(); ++u)
        for (const auto& nb : g.neighbors(u))
            if (d[u] < oracles::kInfiniteDistance) CHECK(d[nb.dest] <= d[u] + nb.weight);
}

TEST_CASE("oracle bc: path of three nodes, full source set") {
    auto score = oracles::bc(path3(), {0, 1, 2});
    REQUIRE(score.size() == 3);
    CHECK(score[0] == doctest::Approx(0.0));
    CHECK(score[1] == doctest::Approx(2.0));
    CHECK(score[2] == doctest::Approx(0.0));
}

TEST_CASE("oracle bc: vertex-transitive cycle gets equal scores") {
    std::vector<EdgeInput> edges;
    int n = 7;
    for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n, {}});
    CsrGraph cycle = CsrGraph::buildFromEdges(n, edges, false);
    std::vector<int32_t> sources;
    for (int v = 0; v < n; ++v) sources.push_back(v);
    auto score = oracles::bc(cycle, sources);
    for (int v = 1; v < n; ++v) CHECK(score[v] == doctest::Approx(score[0]).epsilon(1e-12));
}

TEST_CASE("oracle pr: two-cycle symmetry") {
    CsrGraph g = CsrGraph::buildFromEdges(2, {{0, 1, {}}, {1, 0, {}}}, true);
    auto r = oracles::pr(g, 0.85, 1e-12, 500);
    CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("oracle pr: ranks sum to one (dangling mass redistributed)") {
    auto edges = genRmatEdges(40, 100, 23);
    CsrGraph g = CsrGraph::buildFromEdges(40, edges, true);
    auto r = oracles::pr(g, 0.85, 1e-12, 1000);
    double sum = 0;
    for (double x : r) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("oracle bfs: levels match hand-checked chains") {
    CsrGraph chain = CsrGraph::buildFromEdges(3, {{0, 1, {}}, {1, 2, {}}}, true);
    auto levels = oracles::bfsLevels(chain, 0);
    CHECK(levels == std::vector<int32_t>{0, 1, 2});
    CsrGraph with_iso = CsrGraph::buildFromEdges(3, {{0, 1, {}}}, true);
    auto l2 = oracles::bfsLevels(with_iso, 0);
    CHECK(l2[2] == -1);
}
