#include "graphdsl/oracles.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace graphdsl::oracles {

std::vector<int64_t> sssp(const CsrGraph& g, int32_t src) {
    const int32_t n = g.nodeCount();
    std::vector<int64_t> dist(n, kInfiniteDistance);
    if (src < 0 || src >= n) throw std::out_of_range("sssp: source out of range");
    dist[src] = 0;
    using Item = std::pair<int64_t, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0, src});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d != dist[v]) continue;
        for (const auto& nb : g.neighbors(v)) {
            int64_t cand = d + nb.weight;
            if (cand < dist[nb.dest]) {
                dist[nb.dest] = cand;
                heap.push({cand, nb.dest});
            }
        }
    }
    return dist;
}

std::vector<double> bc(const CsrGraph& g, const std::vector<int32_t>& sources) {
    const int32_t n = g.nodeCount();
    std::vector<double> score(n, 0.0);
    for (int32_t s : sources) {
        if (s < 0 || s >= n) throw std::out_of_range("bc: source out of range");
        // Forward phase: BFS with path counting.
        std::vector<int32_t> level(n, -1);
        std::vector<double> sigma(n, 0.0), delta(n, 0.0);
        std::vector<int32_t> order;  // BFS visitation order
        order.reserve(n);
        level[s] = 0;
        sigma[s] = 1.0;
        std::deque<int32_t> queue{s};
        while (!queue.empty()) {
            int32_t v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (const auto& nb : g.neighbors(v)) {
                int32_t w = nb.dest;
                if (level[w] < 0) {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
                if (level[w] == level[v] + 1) sigma[w] += sigma[v];
            }
        }
        // Backward phase: dependency accumulation in reverse BFS order.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int32_t w = *it;
            for (const auto& nb : g.neighbors(w)) {
                int32_t x = nb.dest;
                if (level[x] == level[w] + 1 && sigma[x] > 0.0)
                    delta[w] += (sigma[w] / sigma[x]) * (1.0 + delta[x]);
            }
            if (w != s) score[w] += delta[w];
        }
    }
    return score;
}

std::vector<double> pr(const CsrGraph& g, double damping, double eps, int maxIter) {
    const int32_t n = g.nodeCount();
    if (n == 0) return {};
    std::vector<double> rank(n, 1.0 / n), next(n, 0.0);
    for (int iter = 0; iter < maxIter; ++iter) {
        double dangling = 0.0;
        for (int32_t v = 0; v < n; ++v)
            if (g.outDegree(v) == 0) dangling += rank[v];
        double maxDelta = 0.0;
        for (int32_t v = 0; v < n; ++v) {
            double sum = dangling / n;
            for (const auto& nb : g.inNeighbors(v)) sum += rank[nb.dest] / g.outDegree(nb.dest);
            next[v] = (1.0 - damping) / n + damping * sum;
            maxDelta = std::max(maxDelta, std::abs(next[v] - rank[v]));
        }
        std::swap(rank, next);
        if (maxDelta < eps) break;
    }
    return rank;
}

int64_t tc(const CsrGraph& g, int32_t maxNodes) {
    const int32_t n = g.nodeCount();
    if (n > maxNodes)
        throw std::invalid_argument("GraphTooLarge: triangle oracle is cubic, refusing n=" +
                                    std::to_string(n));
    std::vector<char> adj(static_cast<size_t>(n) * n, 0);
    for (int32_t u = 0; u < n; ++u)
        for (const auto& nb : g.neighbors(u)) adj[static_cast<size_t>(u) * n + nb.dest] = 1;
    auto has = [&](int32_t a, int32_t b) { return adj[static_cast<size_t>(a) * n + b] != 0; };
    int64_t count = 0;
    for (int32_t u = 0; u < n; ++u)
        for (int32_t v = u + 1; v < n; ++v) {
            if (!has(v, u)) continue;
            for (int32_t w = v + 1; w < n; ++w)
                if (has(v, w) && has(u, w)) ++count;
        }
    return count;
}

std::vector<int32_t> bfsLevels(const CsrGraph& g, int32_t root) {
    const int32_t n = g.nodeCount();
    if (root < 0 || root >= n) throw std::out_of_range("bfs: root out of range");
    std::vector<int32_t> level(n, -1);
    level[root] = 0;
    std::deque<int32_t> queue{root};
    while (!queue.empty()) {
        int32_t v = queue.front();
        queue.pop_front();
        for (const auto& nb : g.neighbors(v))
            if (level[nb.dest] < 0) {
                level[nb.dest] = level[v] + 1;
                queue.push_back(nb.dest);
            }
    }
    return level;
}

}  // namespace graphdsl::oracles
