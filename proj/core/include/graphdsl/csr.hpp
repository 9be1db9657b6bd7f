#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace graphdsl {

struct EdgeInput {
    int32_t u = 0;
    int32_t v = 0;
    std::optional<int32_t> weight;
};

struct NeighborRef {
    int32_t dest = 0;    // forward: destination; reverse: source
    int32_t weight = 1;
    int32_t edgeId = 0;  // index into the forward edge arrays
};

// Immutable CSR graph with forward and reverse adjacency. Per-node adjacency
// is sorted ascending and deduplicated (minimum weight wins), which enables
// binary-search edge lookup. For undirected graphs every edge is stored in
// both directions with the same weight.
class CsrGraph {
public:
    CsrGraph() = default;

    static CsrGraph buildFromEdges(int32_t n, const std::vector<EdgeInput>& edges, bool directed);
    static CsrGraph loadEdgeList(const std::string& path, bool directed,
                                 std::optional<int32_t> nodeCount = std::nullopt);

    int32_t nodeCount() const { return n_; }
    int32_t edgeCount() const { return m_; }  // directed (stored) edge count
    bool directed() const { return directed_; }

    std::span<const int32_t> offsets() const { return offsets_; }
    std::span<const int32_t> dests() const { return dests_; }
    std::span<const int32_t> weights() const { return weights_; }
    std::span<const int32_t> revOffsets() const { return revOffsets_; }
    std::span<const int32_t> revSrcs() const { return revSrcs_; }
    std::span<const int32_t> revEid() const { return revEid_; }

    int32_t outDegree(int32_t v) const { return offsets_[v + 1] - offsets_[v]; }
    int32_t inDegree(int32_t v) const { return revOffsets_[v + 1] - revOffsets_[v]; }

    // Neighbors of v in ascending destination order.
    std::vector<NeighborRef> neighbors(int32_t v) const;
    // In-neighbors of v; edgeId refers to the forward edge (u -> v).
    std::vector<NeighborRef> inNeighbors(int32_t v) const;

    bool isEdge(int32_t u, int32_t v) const;               // binary search
    std::optional<int32_t> edgeIndex(int32_t u, int32_t v) const;

    int32_t minWeight() const;
    int32_t maxWeight() const;

    // Reassigns edge weights uniformly at random in [lo, hi]; both directions
    // of an undirected edge share one draw. Same seed, same weights.
    CsrGraph withRandomWeights(int32_t lo, int32_t hi, uint64_t seed) const;

    // Exact transpose; rev arrays are recomputed for the flipped graph.
    CsrGraph transpose() const;

    bool operator==(const CsrGraph& o) const;

private:
    void checkNode(int32_t v) const;
    void buildReverse();

    int32_t n_ = 0;
    int32_t m_ = 0;
    bool directed_ = true;
    std::vector<int32_t> offsets_;     // n+1
    std::vector<int32_t> dests_;       // m
    std::vector<int32_t> weights_;     // m
    std::vector<int32_t> revOffsets_;  // n+1
    std::vector<int32_t> revSrcs_;     // m
    std::vector<int32_t> revEid_;      // m, reverse slot -> forward edge index
};

// Writes the graph back out as an edge-list file (canonical form: one line
// per stored directed edge for directed graphs, one line per u <= v pair for
// undirected ones).
void writeEdgeList(const CsrGraph& g, const std::string& path, bool withWeights);

}  // namespace graphdsl
