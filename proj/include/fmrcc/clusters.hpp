#pragma once

#include <string>
#include <vector>

#include "fmrcc/solver.hpp"
#include "fmrcc/types.hpp"

// Post-fit covariate cluster extraction and the agreement metric, plus
// similarity-matrix builders.

namespace fmrcc::clusters {

using Block = std::vector<std::size_t>;
using Partition = std::vector<Block>;  // disjoint, exhaustive over {0..p-1}

struct ClusterGraph {
    struct Edge {
        std::size_t j, k;  // j < k, zero-based
        bool operator==(const Edge&) const = default;
    };
    std::vector<std::vector<Edge>> edges;     // per component
    std::vector<Partition> partitions;        // connected components of the edges

    bool operator==(const ClusterGraph&) const = default;
};

// Edge (j,k) iff the final z_{j,k,h} equals z_{k,j,h} exactly; the fused
// branch of the z update produces exact equality, so no tolerance applies.
ClusterGraph extract_clusters(const solver::FitResult& result);

// Same extraction from the raw ADMM state.
ClusterGraph extract_clusters(const solver::AdmmState& state);

// Correctly clustered proportion: match true blocks to distinct estimated
// blocks by maximum total overlap; CCP = matched overlap / p.
double ccp(const Partition& estimated, const Partition& truth);

SimilarityMatrix cosine_similarity_matrix(const Matrix& design);

SimilarityMatrix constant_similarity_matrix(std::size_t p, double value);

// Edge-list text: "component,j,k" lines (1-based) followed by
// "component,block,covariate" membership lines, ascending order.
std::string export_graph(const ClusterGraph& graph);

}  // namespace fmrcc::clusters
