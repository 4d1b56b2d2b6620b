#pragma once

// Independent brute-force oracles used by the test suites. These deliberately
// avoid the library's algorithms: paths are enumerated, assignments and
// matchings are tried exhaustively.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ridepool/assignment.hpp"
#include "ridepool/matching.hpp"
#include "ridepool/network.hpp"

namespace brute {

struct PathResult {
    double distance = std::numeric_limits<double>::infinity();
    std::vector<ridepool::NodeId> nodes; // lexicographically smallest among minima
};

// All simple paths by DFS; only usable on tiny graphs.
inline PathResult shortest_path(const ridepool::RoadNetwork& net, ridepool::NodeId o,
                                ridepool::NodeId d) {
    PathResult best;
    std::vector<ridepool::NodeId> stack{o};
    std::vector<char> visited(net.node_count() + 1024, 0);

    auto node_slot = [&](ridepool::NodeId id) {
        const auto& ids = net.nodes();
        return std::lower_bound(ids.begin(), ids.end(), id) - ids.begin();
    };

    std::function<void(ridepool::NodeId, double)> dfs = [&](ridepool::NodeId u, double len) {
        if (u == d) {
            if (len < best.distance ||
                (len == best.distance && (best.nodes.empty() || stack < best.nodes))) {
                best.distance = len;
                best.nodes = stack;
            }
            return;
        }
        for (ridepool::LinkId lid : net.out_links(u)) {
            const auto& link = net.link(lid);
            auto slot = node_slot(link.head);
            if (visited[slot]) continue;
            visited[slot] = 1;
            stack.push_back(link.head);
            dfs(link.head, len + link.length_m);
            stack.pop_back();
            visited[slot] = 0;
        }
    };
    visited[node_slot(o)] = 1;
    if (o == d) {
        best.distance = 0.0;
        best.nodes = {o};
        return best;
    }
    dfs(o, 0.0);
    return best;
}

// Exhaustive maximum-weight assignment over the same option structure the
// solver takes: every row picks one option, shared ids used at most once.
inline double best_assignment_value(const ridepool::AssignProblem& p) {
    const int n = static_cast<int>(p.rows.size());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> used; // shared option ids in use
    std::function<void(int, double)> rec = [&](int row, double acc) {
        if (row == n) {
            best = std::max(best, acc);
            return;
        }
        for (const auto& opt : p.rows[row]) {
            if (opt.option_id >= 0) {
                if (std::find(used.begin(), used.end(), opt.option_id) != used.end()) continue;
                used.push_back(opt.option_id);
                rec(row + 1, acc + opt.weight);
                used.pop_back();
            } else {
                rec(row + 1, acc + opt.weight);
            }
        }
    };
    rec(0, 0.0);
    return best;
}

struct MatchingValue {
    double weight = 0.0;
    int edges = 0;
};

// All matchings of a small weighted graph; maximizes weight, or cardinality
// then weight.
inline MatchingValue best_matching(int n, const std::vector<ridepool::WeightedEdge>& edges,
                                   bool max_cardinality) {
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
    for (const auto& e : edges) {
        w[e.u][e.v] = w[e.v][e.u] = e.weight;
        has[e.u][e.v] = has[e.v][e.u] = 1;
    }
    MatchingValue best{-std::numeric_limits<double>::infinity(), -1};
    std::vector<char> used(n, 0);
    auto better = [&](const MatchingValue& a, const MatchingValue& b) {
        if (max_cardinality && a.edges != b.edges) return a.edges > b.edges;
        return a.weight > b.weight;
    };
    std::function<void(int, MatchingValue)> rec = [&](int v, MatchingValue acc) {
        while (v < n && used[v]) ++v;
        if (v >= n) {
            if (better(acc, best)) best = acc;
            return;
        }
        used[v] = 1;
        rec(v + 1, acc); // leave v single
        for (int u = v + 1; u < n; ++u) {
            if (used[u] || !has[v][u]) continue;
            used[u] = 1;
            rec(v + 1, {acc.weight + w[v][u], acc.edges + 1});
            used[u] = 0;
        }
        used[v] = 0;
    };
    rec(0, {0.0, 0});
    return best;
}

} // namespace brute
