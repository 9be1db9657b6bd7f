#include "graphdsl/graphgen.hpp"

#include <random>
#include <stdexcept>

namespace graphdsl {

std::vector<EdgeInput> genUniformEdges(int32_t nodes, int64_t edges, uint64_t seed) {
    if (nodes <= 0) throw std::invalid_argument("node count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int32_t> pick(0, nodes - 1);
    std::vector<EdgeInput> out;
    out.reserve(edges);
    for (int64_t i = 0; i < edges; ++i) out.push_back({pick(rng), pick(rng), std::nullopt});
    return out;
}

std::vector<EdgeInput> genRmatEdges(int32_t nodes, int64_t edges, uint64_t seed,
                                    RmatParams params) {
    if (nodes <= 0) throw std::invalid_argument("node count must be positive");
    double total = params.a + params.b + params.c + params.d;
    if (total <= 0) throw std::invalid_argument("RMAT parameters must sum to a positive value");

    int levels = 0;
    while ((1 << levels) < nodes) ++levels;
    if (levels == 0) levels = 1;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pa = params.a / total;
    const double pb = params.b / total;
    const double pc = params.c / total;

    std::vector<EdgeInput> out;
    out.reserve(edges);
    while (static_cast<int64_t>(out.size()) < edges) {
        int32_t u = 0, v = 0;
        for (int l = 0; l < levels; ++l) {
            double r = unit(rng);
            int32_t half = 1 << (levels - 1 - l);
            if (r < pa) {
                // top-left quadrant
            } else if (r < pa + pb) {
                v += half;
            } else if (r < pa + pb + pc) {
                u += half;
            } else {
                u += half;
                v += half;
            }
        }
        if (u >= nodes || v >= nodes) continue;
        out.push_back({u, v, std::nullopt});
    }
    return out;
}

}  // namespace graphdsl
