#include "ridepool/domain.hpp"

namespace ridepool {

const char* to_string(OrderStatus s) {
    switch (s) {
    case OrderStatus::waiting: return "waiting";
    case OrderStatus::dispatched: return "dispatched";
    case OrderStatus::picked_up_solo: return "picked_up_solo";
    case OrderStatus::paired: return "paired";
    case OrderStatus::delivered: return "delivered";
    case OrderStatus::cancelled: return "cancelled";
    }
    return "?";
}

double pickup_distance(const RoadNetwork& net, NodeId vehicle_node, const Order& order) {
    return net.shortest_distance(vehicle_node, order.od.origin);
}

std::pair<double, double> trip_lengths_fofo_folo(const RoadNetwork& net, const ODPair& first,
                                                 const ODPair& second, NodeId v_loc) {
    const double driven = net.shortest_distance(first.origin, v_loc);
    const double to_pickup = net.shortest_distance(v_loc, second.origin);
    const double fofo = driven + to_pickup +
                        net.shortest_distance(second.origin, first.destination) +
                        net.shortest_distance(first.destination, second.destination);
    const double folo = driven + to_pickup +
                        net.shortest_distance(second.origin, second.destination) +
                        net.shortest_distance(second.destination, first.destination);
    return {fofo, folo};
}

double distance_saving(const RoadNetwork& net, const ODPair& first, const ODPair& second,
                       NodeId v_loc) {
    auto [fofo, folo] = trip_lengths_fofo_folo(net, first, second, v_loc);
    return first.length_m + second.length_m - std::min(fofo, folo);
}

std::pair<double, double> detours(const RoadNetwork& net, const ODPair& first,
                                  const ODPair& second, NodeId v_loc, ServeMode mode) {
    const double driven = net.shortest_distance(first.origin, v_loc);
    const double to_pickup = net.shortest_distance(v_loc, second.origin);
    double ride_first, ride_second;
    if (mode == ServeMode::fofo) {
        ride_first = driven + to_pickup + net.shortest_distance(second.origin, first.destination);
        ride_second = net.shortest_distance(second.origin, first.destination) +
                      net.shortest_distance(first.destination, second.destination);
    } else {
        ride_first = driven + to_pickup + second.length_m +
                     net.shortest_distance(second.destination, first.destination);
        ride_second = second.length_m;
    }
    return {ride_first - first.length_m, ride_second - second.length_m};
}

PairGeometry best_pair_geometry(const RoadNetwork& net, const ODPair& first, const ODPair& second,
                                NodeId v_loc, double max_detour_m) {
    PairGeometry g;
    auto [fofo, folo] = trip_lengths_fofo_folo(net, first, second, v_loc);
    g.fofo_len_m = fofo;
    g.folo_len_m = folo;
    auto [d1_fofo, d2_fofo] = detours(net, first, second, v_loc, ServeMode::fofo);
    auto [d1_folo, d2_folo] = detours(net, first, second, v_loc, ServeMode::folo);
    const bool fofo_ok = d1_fofo <= max_detour_m && d2_fofo <= max_detour_m;
    const bool folo_ok = d1_folo <= max_detour_m && d2_folo <= max_detour_m;
    if (!fofo_ok && !folo_ok) return g;
    g.feasible = true;
    if (fofo_ok && (!folo_ok || fofo <= folo)) {
        g.mode = ServeMode::fofo;
        g.trip_len_m = fofo;
        g.detour_first_m = d1_fofo;
        g.detour_second_m = d2_fofo;
    } else {
        g.mode = ServeMode::folo;
        g.trip_len_m = folo;
        g.detour_first_m = d1_folo;
        g.detour_second_m = d2_folo;
    }
    g.saving_m = first.length_m + second.length_m - g.trip_len_m;
    return g;
}

NodeId pair_eval_location(const VehicleView& v) {
    return v.pickup_pending ? v.onboard_od.origin : v.node;
}

std::vector<VehicleCandidate> feasible_pairs(const Order& order,
                                             std::span<const VehicleView> vehicles,
                                             const RoadNetwork& net, const PairingConfig& cfg) {
    std::vector<VehicleCandidate> out;
    for (const VehicleView& v : vehicles) {
        if (v.full()) continue;
        if (!net.reachable(v.node, order.od.origin)) continue;
        const double pk = net.shortest_distance(v.node, order.od.origin);
        if (!(pk < cfg.max_pickup_m)) continue;
        if (v.vacant()) {
            out.push_back({v.id, false, pk, {}});
        } else {
            PairGeometry g = best_pair_geometry(net, v.onboard_od, order.od,
                                                pair_eval_location(v), cfg.max_detour_m);
            if (g.feasible) out.push_back({v.id, true, pk, g});
        }
    }
    return out;
}

} // namespace ridepool
