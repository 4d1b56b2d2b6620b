#pragma once

#include <vector>

namespace ridepool {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 0.0;
};

/// Exact maximum-weight matching on a general graph (primal-dual blossom
/// method). Returns mate[v] = partner vertex or -1. With max_cardinality set,
/// maximizes the number of matched vertices first and total weight second.
std::vector<int> max_weight_matching(int n, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality = false);

} // namespace ridepool
