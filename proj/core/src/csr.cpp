#include "graphdsl/csr.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "graphdsl/diagnostics.hpp"

namespace graphdsl {

namespace {

struct RawEdge {
    int32_t u, v, w;
    int32_t id;  // original insertion index, used for canonical undirected pairing
};

}  // namespace

void CsrGraph::checkNode(int32_t v) const {
    if (v < 0 || v >= n_)
        throw std::out_of_range("node id " + std::to_string(v) + " out of range [0, " +
                                std::to_string(n_) + ")");
}

CsrGraph CsrGraph::buildFromEdges(int32_t n, const std::vector<EdgeInput>& edges, bool directed) {
    if (n < 0) throw std::invalid_argument("negative node count");
    std::vector<RawEdge> raw;
    raw.reserve(edges.size() * (directed ? 1 : 2));
    int32_t id = 0;
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw std::invalid_argument("InvalidEdge: endpoint (" + std::to_string(e.u) + ", " +
                                        std::to_string(e.v) + ") out of range [0, " +
                                        std::to_string(n) + ")");
        int32_t w = e.weight.value_or(1);
        if (w < 0)
            throw std::invalid_argument("NegativeWeight: edge (" + std::to_string(e.u) + ", " +
                                        std::to_string(e.v) + ") has weight " + std::to_string(w));
        raw.push_back({e.u, e.v, w, id});
        if (!directed && e.u != e.v) raw.push_back({e.v, e.u, w, id});
        ++id;
    }

    std::sort(raw.begin(), raw.end(), [](const RawEdge& a, const RawEdge& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.v != b.v) return a.v < b.v;
        return a.w < b.w;
    });
    // Dedup parallel edges, keeping the minimum weight.
    std::vector<RawEdge> uniq;
    uniq.reserve(raw.size());
    for (const auto& e : raw) {
        if (!uniq.empty() && uniq.back().u == e.u && uniq.back().v == e.v) continue;
        uniq.push_back(e);
    }

    CsrGraph g;
    g.n_ = n;
    g.m_ = static_cast<int32_t>(uniq.size());
    g.directed_ = directed;
    g.offsets_.assign(n + 1, 0);
    g.dests_.resize(uniq.size());
    g.weights_.resize(uniq.size());
    for (const auto& e : uniq) g.offsets_[e.u + 1]++;
    for (int32_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    for (size_t i = 0; i < uniq.size(); ++i) {
        g.dests_[i] = uniq[i].v;
        g.weights_[i] = uniq[i].w;
    }
    g.buildReverse();
    return g;
}

void CsrGraph::buildReverse() {
    revOffsets_.assign(n_ + 1, 0);
    revSrcs_.resize(m_);
    revEid_.resize(m_);
    for (int32_t e = 0; e < m_; ++e) revOffsets_[dests_[e] + 1]++;
    for (int32_t i = 0; i < n_; ++i) revOffsets_[i + 1] += revOffsets_[i];
    std::vector<int32_t> cursor(revOffsets_.begin(), revOffsets_.end() - 1);
    // Forward edges are visited in (u, v) sorted order, so each reverse range
    // comes out sorted by source.
    for (int32_t u = 0; u < n_; ++u) {
        for (int32_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
            int32_t v = dests_[e];
            int32_t slot = cursor[v]++;
            revSrcs_[slot] = u;
            revEid_[slot] = e;
        }
    }
}

CsrGraph CsrGraph::loadEdgeList(const std::string& path, bool directed,
                                std::optional<int32_t> nodeCount) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::vector<EdgeInput> edges;
    int32_t maxId = -1;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v))
            throw parseError({static_cast<uint32_t>(lineNo), 1, 0},
                             "malformed edge line in " + path);
        EdgeInput e;
        long long w;
        if (ls >> w) e.weight = static_cast<int32_t>(w);
        std::string rest;
        if (ls >> rest)
            throw parseError({static_cast<uint32_t>(lineNo), 1, 0},
                             "trailing characters on edge line in " + path);
        if (u < 0 || v < 0 || u > INT32_MAX || v > INT32_MAX)
            throw parseError({static_cast<uint32_t>(lineNo), 1, 0},
                             "node id out of range in " + path);
        e.u = static_cast<int32_t>(u);
        e.v = static_cast<int32_t>(v);
        maxId = std::max(maxId, std::max(e.u, e.v));
        edges.push_back(e);
    }
    int32_t n = nodeCount.value_or(maxId + 1);
    return buildFromEdges(n, edges, directed);
}

std::vector<NeighborRef> CsrGraph::neighbors(int32_t v) const {
    checkNode(v);
    std::vector<NeighborRef> out;
    out.reserve(outDegree(v));
    for (int32_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
        out.push_back({dests_[e], weights_[e], e});
    return out;
}

std::vector<NeighborRef> CsrGraph::inNeighbors(int32_t v) const {
    checkNode(v);
    std::vector<NeighborRef> out;
    out.reserve(inDegree(v));
    for (int32_t s = revOffsets_[v]; s < revOffsets_[v + 1]; ++s)
        out.push_back({revSrcs_[s], weights_[revEid_[s]], revEid_[s]});
    return out;
}

std::optional<int32_t> CsrGraph::edgeIndex(int32_t u, int32_t v) const {
    checkNode(u);
    checkNode(v);
    auto first = dests_.begin() + offsets_[u];
    auto last = dests_.begin() + offsets_[u + 1];
    auto it = std::lower_bound(first, last, v);
    if (it == last || *it != v) return std::nullopt;
    return static_cast<int32_t>(it - dests_.begin());
}

bool CsrGraph::isEdge(int32_t u, int32_t v) const { return edgeIndex(u, v).has_value(); }

int32_t CsrGraph::minWeight() const {
    if (m_ == 0) return 0;
    return *std::min_element(weights_.begin(), weights_.end());
}

int32_t CsrGraph::maxWeight() const {
    if (m_ == 0) return 0;
    return *std::max_element(weights_.begin(), weights_.end());
}

CsrGraph CsrGraph::withRandomWeights(int32_t lo, int32_t hi, uint64_t seed) const {
    if (lo > hi) throw std::invalid_argument("weight range is empty");
    CsrGraph g = *this;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int32_t> dist(lo, hi);
    if (directed_) {
        for (int32_t e = 0; e < m_; ++e) g.weights_[e] = dist(rng);
        return g;
    }
    // One draw per unordered pair, visited in canonical (u <= v) CSR order.
    for (int32_t u = 0; u < n_; ++u) {
        for (int32_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
            int32_t v = dests_[e];
            if (v < u) continue;
            int32_t w = dist(rng);
            g.weights_[e] = w;
            if (v != u) {
                auto mirror = edgeIndex(v, u);
                if (mirror) g.weights_[*mirror] = w;
            }
        }
    }
    return g;
}

CsrGraph CsrGraph::transpose() const {
    std::vector<EdgeInput> flipped;
    flipped.reserve(m_);
    for (int32_t u = 0; u < n_; ++u)
        for (int32_t e = offsets_[u]; e < offsets_[u + 1]; ++e)
            flipped.push_back({dests_[e], u, weights_[e]});
    return buildFromEdges(n_, flipped, true);
}

bool CsrGraph::operator==(const CsrGraph& o) const {
    return n_ == o.n_ && m_ == o.m_ && offsets_ == o.offsets_ && dests_ == o.dests_ &&
           weights_ == o.weights_;
}

void writeEdgeList(const CsrGraph& g, const std::string& path, bool withWeights) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "# nodes " << g.nodeCount() << " stored-edges " << g.edgeCount() << "\n";
    for (int32_t u = 0; u < g.nodeCount(); ++u) {
        for (const auto& nb : g.neighbors(u)) {
            if (!g.directed() && nb.dest < u) continue;
            out << u << " " << nb.dest;
            if (withWeights) out << " " << nb.weight;
            out << "\n";
        }
    }
}

}  // namespace graphdsl
