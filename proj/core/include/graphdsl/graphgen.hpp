#pragma once

#include <cstdint>
#include <vector>

#include "graphdsl/csr.hpp"

namespace graphdsl {

struct RmatParams {
    double a = 0.57;
    double b = 0.19;
    double c = 0.19;
    double d = 0.05;
};

// Uniform-random edge endpoints; may contain duplicates and self loops, which
// the CSR builder dedups/keeps respectively.
std::vector<EdgeInput> genUniformEdges(int32_t nodes, int64_t edges, uint64_t seed);

// RMAT-style recursive quadrant sampling (skewed degree distribution). Nodes
// are treated as the next power of two internally; out-of-range endpoints are
// resampled.
std::vector<EdgeInput> genRmatEdges(int32_t nodes, int64_t edges, uint64_t seed,
                                    RmatParams params = {});

}  // namespace graphdsl
