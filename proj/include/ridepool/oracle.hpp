#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ridepool/domain.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

struct OfflineOrder {
    int id = -1;
    double arrival_s = 0.0;
    ODPair od;
};

/// Full-horizon pairwise saving matrix. e(i,j) is the serving-mode-optimal
/// saving with the earlier-arriving order picked up first and the route
/// starting at its origin; 0 when no serving order keeps both detours within
/// bounds. Symmetric, zero diagonal.
struct OfflineInstance {
    std::vector<OfflineOrder> orders;
    std::vector<double> saving_m;  // n*n
    std::vector<char> feasible;    // n*n, detour-feasible (saving may still be <= 0)

    double e(int i, int j) const { return saving_m[static_cast<std::size_t>(i) * orders.size() + j]; }
    bool ok(int i, int j) const { return feasible[static_cast<std::size_t>(i) * orders.size() + j]; }
};

// max_arrival_gap_s: optional extension gating pairs on |arrival_i - arrival_j|;
// off by default (the offline bound places no constraint on arrival times).
OfflineInstance build_offline_instance(const std::vector<OfflineOrder>& orders,
                                       const RoadNetwork& net, const PairingConfig& cfg,
                                       std::optional<double> max_arrival_gap_s = std::nullopt);

struct OracleSolution {
    std::vector<int> mate;   // partner index or -1 (self-paired)
    double total_saving_m = 0.0;
    int paired_orders = 0;   // count of orders riding in a pair
    double pairing_ratio = 0.0;
};

/// Maximum total distance saving over a perfect pairing with self-loops.
OracleSolution solve_oracle1(const OfflineInstance& instance);

/// Maximum number of paired orders; ties broken toward larger total saving.
/// Eligible pairs are detour-feasible with nonnegative saving.
OracleSolution solve_oracle2(const OfflineInstance& instance);

void write_pairing_csv(const OfflineInstance& instance, const OracleSolution& sol,
                       const std::string& path);

} // namespace ridepool
