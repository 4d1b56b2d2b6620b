#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ridepool/network.hpp"

namespace ridepool {

enum class OrderStatus {
    waiting,        // admitted, not yet assigned
    dispatched,     // assigned to a vehicle, pickup pending
    picked_up_solo, // aboard a partially occupied vehicle (a taker)
    paired,         // committed to a pooled trip
    delivered,
    cancelled,
};

const char* to_string(OrderStatus s);

struct Order {
    int id = -1;
    ODPair od;
    double arrival_s = 0.0;
    double max_wait_s = 0.0;
    int rounds_waited = 0; // k_p, incremented once per unmatched round
    OrderStatus status = OrderStatus::waiting;
};

enum class ServeMode { fofo, folo };

inline const char* to_string(ServeMode m) { return m == ServeMode::fofo ? "fofo" : "folo"; }

struct PairingConfig {
    double max_pickup_m = 3000.0;  // strict: pickup < max_pickup_m
    double max_detour_m = 3000.0;  // non-strict: detour <= max_detour_m
    double batch_interval_s = 10.0;
};

/// Pooled-trip geometry for a (first rider, second rider) pair measured from
/// v_loc, the point where the shared route deviates from the first rider's own
/// path. Lengths follow the two serving orders: the first rider boards first;
/// fofo drops the first rider first, folo drops the second rider first.
struct PairGeometry {
    bool feasible = false; // some serving order keeps both detours within bounds
    ServeMode mode = ServeMode::fofo;
    double fofo_len_m = 0.0;
    double folo_len_m = 0.0;
    double trip_len_m = 0.0;      // chosen mode, from the first rider's origin onward
    double saving_m = 0.0;        // exclusive lengths minus chosen trip length
    double detour_first_m = 0.0;  // chosen mode
    double detour_second_m = 0.0; // chosen mode
};

double pickup_distance(const RoadNetwork& net, NodeId vehicle_node, const Order& order);

// (l_fofo, l_folo) trip lengths; first's origin -> v_loc is the already-driven leg.
std::pair<double, double> trip_lengths_fofo_folo(const RoadNetwork& net, const ODPair& first,
                                                 const ODPair& second, NodeId v_loc);

double distance_saving(const RoadNetwork& net, const ODPair& first, const ODPair& second,
                       NodeId v_loc);

// per-rider in-vehicle distance minus exclusive shortest distance
std::pair<double, double> detours(const RoadNetwork& net, const ODPair& first,
                                  const ODPair& second, NodeId v_loc, ServeMode mode);

// Serving-mode selection: among modes whose two detours are both within
// max_detour_m, the one with the smaller trip length; ties go to fofo.
PairGeometry best_pair_geometry(const RoadNetwork& net, const ODPair& first, const ODPair& second,
                                NodeId v_loc, double max_detour_m);

/// Strategy-facing snapshot of a vehicle at a decision instant.
struct VehicleView {
    int id = -1;
    NodeId node = -1;       // position queries see the node most recently reached
    int committed = 0;      // orders assigned and not yet all delivered (0, 1 or 2)
    // fields below are meaningful when committed == 1
    int onboard_order = -1;
    ODPair onboard_od;
    bool pickup_pending = false; // assigned but the first rider is not aboard yet

    bool vacant() const { return committed == 0; }
    bool partially_occupied() const { return committed == 1; }
    bool full() const { return committed >= 2; }
};

struct VehicleCandidate {
    int vehicle_id = -1;
    bool partial = false;   // false: vacant (V0), true: partially occupied (V1)
    double pickup_m = 0.0;
    PairGeometry geometry;  // valid when partial
};

/// V_{0,p} and V_{1,p} with the best serving mode per partially occupied
/// candidate. Results are ordered by vehicle id.
std::vector<VehicleCandidate> feasible_pairs(const Order& order,
                                             std::span<const VehicleView> vehicles,
                                             const RoadNetwork& net, const PairingConfig& cfg);

// v_loc used for pair geometry against a partially occupied vehicle: the
// vehicle's node when the first rider is aboard, the first rider's origin when
// that pickup is still pending (the shared route then starts there).
NodeId pair_eval_location(const VehicleView& v);

} // namespace ridepool
