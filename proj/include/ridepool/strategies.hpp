#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ridepool/assignment.hpp"
#include "ridepool/domain.hpp"
#include "ridepool/prediction.hpp"

namespace ridepool {

enum class Strategy { np, mb, rtv, fl, fl_no_delay, fl_naive };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& s);

struct UtilityContext {
    double alpha = 1.01;
    double r_w = 0.75;
    double avg_pickup_m = 0.0; // calibrated mean pickup distance (wait-option cost)
    int k_rounds_pop = 9;      // ceil(mean max wait / batch interval)
    PairingConfig cfg;
    const RoadNetwork* net = nullptr;
    const StateSpace* space = nullptr;       // forward-looking strategies only
    const PredictionTables* tables = nullptr;

    // lookup of an order's OD in the prediction tables; -1 when absent
    int od_index(const ODPair& od) const;
};

// Eq.-level utilities. `cand` must be a feasible candidate for the order.
double utility_myopic(const Order& order, const VehicleCandidate& cand,
                      const UtilityContext& ctx);
double utility_fl_vehicle(const Order& order, const VehicleCandidate& cand,
                          const UtilityContext& ctx);
double utility_fl_wait(const Order& order, const UtilityContext& ctx);
double utility_fl_no_delay(const Order& order, const VehicleCandidate& cand,
                           const UtilityContext& ctx);
// u': the unrevised combination of prediction and net saving (kept as an
// experimental variant; its vehicle utilities ignore waiting rounds)
double utility_naive_vehicle(const Order& order, const VehicleCandidate& cand,
                             const UtilityContext& ctx);
double utility_naive_wait(const Order& order, const UtilityContext& ctx);

struct WorldSnapshot {
    std::vector<const Order*> waiting; // sorted by id
    std::vector<VehicleView> vehicles; // sorted by id
    int round = 0;
};

struct AssignmentDecision {
    int order_id = -1;
    int vehicle_id = -1; // -1: kept waiting (WAIT edge or no feasible vehicle)
    bool pool_with_onboard = false;
    ServeMode mode = ServeMode::fofo;
    double saving_m = 0.0;
    double pickup_m = 0.0;
    double utility = 0.0;
};

// RTV: two waiting requests pooled into one vacant vehicle.
struct PairTripDecision {
    int first_order = -1; // picked up first
    int second_order = -1;
    int vehicle_id = -1;
    ServeMode mode = ServeMode::fofo;
    double saving_m = 0.0;
    double pickup_first_m = 0.0;
    double pickup_second_m = 0.0;
};

struct BatchMatchResult {
    std::vector<AssignmentDecision> assignments; // one entry per waiting passenger
    std::vector<PairTripDecision> pair_trips;    // RTV only
    double objective = 0.0;                      // sum of chosen raw utilities / savings
    int round = 0;
};

/// Runs one matching round under the given strategy. Forward-looking
/// strategies require ctx.space and ctx.tables.
BatchMatchResult dispatch_round(Strategy strategy, const WorldSnapshot& snap,
                                const UtilityContext& ctx);

// Shareability of two waiting requests (RTV step i): some pickup order and
// serving mode keeps both detours within bounds and the second pickup leg
// below the pickup radius. Returns the saving-maximal feasible combination.
struct PairTripGeometry {
    bool feasible = false;
    int first = 0; // 0: a first, 1: b first
    ServeMode mode = ServeMode::fofo;
    double saving_m = 0.0;
};
PairTripGeometry pair_trip_geometry(const RoadNetwork& net, const ODPair& a, const ODPair& b,
                                    const PairingConfig& cfg);

} // namespace ridepool
