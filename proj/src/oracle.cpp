#include "ridepool/oracle.hpp"

#include <cmath>
#include <fstream>

#include "ridepool/csv.hpp"
#include "ridepool/matching.hpp"

namespace ridepool {

OfflineInstance build_offline_instance(const std::vector<OfflineOrder>& orders,
                                       const RoadNetwork& net, const PairingConfig& cfg,
                                       std::optional<double> max_arrival_gap_s) {
    OfflineInstance inst;
    inst.orders = orders;
    const std::size_t n = orders.size();
    inst.saving_m.assign(n * n, 0.0);
    inst.feasible.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (max_arrival_gap_s &&
                std::fabs(orders[i].arrival_s - orders[j].arrival_s) > *max_arrival_gap_s)
                continue;
            // earlier arrival boards first; ties to the smaller id
            const OfflineOrder* first = &orders[i];
            const OfflineOrder* second = &orders[j];
            if (second->arrival_s < first->arrival_s ||
                (second->arrival_s == first->arrival_s && second->id < first->id))
                std::swap(first, second);
            if (!net.reachable(first->od.origin, second->od.origin)) continue;
            PairGeometry g = best_pair_geometry(net, first->od, second->od, first->od.origin,
                                                cfg.max_detour_m);
            if (!g.feasible) continue;
            inst.saving_m[i * n + j] = inst.saving_m[j * n + i] = g.saving_m;
            inst.feasible[i * n + j] = inst.feasible[j * n + i] = 1;
        }
    }
    return inst;
}

namespace {

OracleSolution from_mate(const OfflineInstance& inst, std::vector<int> mate) {
    OracleSolution sol;
    sol.mate = std::move(mate);
    const int n = static_cast<int>(inst.orders.size());
    for (int i = 0; i < n; ++i) {
        if (sol.mate[i] > i) sol.total_saving_m += inst.e(i, sol.mate[i]);
        if (sol.mate[i] >= 0) ++sol.paired_orders;
    }
    sol.pairing_ratio = n > 0 ? static_cast<double>(sol.paired_orders) / n : 0.0;
    return sol;
}

} // namespace

OracleSolution solve_oracle1(const OfflineInstance& inst) {
    const int n = static_cast<int>(inst.orders.size());
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (inst.ok(i, j) && inst.e(i, j) > 0.0) edges.push_back({i, j, inst.e(i, j)});
    return from_mate(inst, max_weight_matching(n, edges, false));
}

OracleSolution solve_oracle2(const OfflineInstance& inst) {
    const int n = static_cast<int>(inst.orders.size());
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (inst.ok(i, j) && inst.e(i, j) >= 0.0) edges.push_back({i, j, inst.e(i, j)});
    return from_mate(inst, max_weight_matching(n, edges, true));
}

void write_pairing_csv(const OfflineInstance& inst, const OracleSolution& sol,
                       const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << "order_i,order_j,saving_m\n";
    const int n = static_cast<int>(inst.orders.size());
    for (int i = 0; i < n; ++i) {
        if (sol.mate[i] > i)
            f << inst.orders[i].id << ',' << inst.orders[sol.mate[i]].id << ','
              << format_double(inst.e(i, sol.mate[i])) << '\n';
    }
}

} // namespace ridepool
