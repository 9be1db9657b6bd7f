#pragma once

#include <cstdint>
#include <vector>

#include "graphdsl/csr.hpp"

namespace graphdsl::oracles {

// Distance assigned to unreachable nodes; half the int64 range so that a
// relaxation step can never overflow.
inline constexpr int64_t kInfiniteDistance = INT64_MAX / 2;

// Binary-heap Dijkstra over nonnegative edge weights.
std::vector<int64_t> sssp(const CsrGraph& g, int32_t src);

// Sequential Brandes restricted to the given source set: per-source BFS with
// path counting, then backward dependency accumulation. Unnormalized,
// endpoints excluded.
std::vector<double> bc(const CsrGraph& g, const std::vector<int32_t>& sources);

// r(v) = (1-d)/n + d * (sum over in-neighbors u of r(u)/outdeg(u) + dangling/n),
// double buffered; stops when max per-node delta < eps or after maxIter rounds.
std::vector<double> pr(const CsrGraph& g, double damping, double eps, int maxIter);

// Counts ordered triples u < v < w with u,w adjacent to v and (u,w) an edge,
// via a dense adjacency matrix. Guarded to small graphs.
int64_t tc(const CsrGraph& g, int32_t maxNodes = 256);

// Queue-based BFS levels (-1 = unreachable), used to validate the level-wise
// interpreter implementation.
std::vector<int32_t> bfsLevels(const CsrGraph& g, int32_t root);

}  // namespace graphdsl::oracles
