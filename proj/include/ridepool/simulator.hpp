#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/domain.hpp"
#include "ridepool/network.hpp"
#include "ridepool/prediction.hpp"
#include "ridepool/strategies.hpp"

namespace ridepool {

struct SimConfig {
    double dt_s = 10.0;
    double horizon_s = 3600.0;
    double drivers_per_order = 0.25; // order-driver ratio 100:25
    double speed_mps = 30000.0 / 3600.0;
    double max_wait_mean_s = 90.0;
    double max_wait_sd_s = 10.0;
    double alpha = 1.01;
    double r_w = 0.75;
    double max_pickup_m = 3000.0;
    double max_detour_m = 3000.0;
    double fare_solo_per_km = 5.0;
    double fare_shared_per_km = 3.5;
    double driver_pay_per_km = 2.0;
    std::uint64_t seed = 1; // mandatory; no wall-clock entropy anywhere

    PairingConfig pairing() const { return {max_pickup_m, max_detour_m, dt_s}; }
    int k_rounds_pop() const { return static_cast<int>(std::ceil(max_wait_mean_s / dt_s)); }
};

struct RunMetrics {
    long admitted = 0;
    long responded = 0;
    long cancelled = 0;
    long residual_waiting = 0;
    long pooled_riders = 0;
    long picked_up = 0;
    long pairs = 0;

    double sum_resp_time_s = 0.0;
    double sum_pk_time_s = 0.0;
    double sum_pickup_m = 0.0; // pickup distance at assignment, over responded
    double sum_detour_m = 0.0;
    double sum_share_m = 0.0;
    double occupied_m = 0.0;
    double save_m = 0.0;
    double fares = 0.0;
    double driver_pay = 0.0;

    double response_rate() const { return admitted ? double(responded) / admitted : 0.0; }
    double pairing_ratio() const { return responded ? double(pooled_riders) / responded : 0.0; }
    double profit() const { return fares - driver_pay; }
    double avg_resp_time_s() const { return responded ? sum_resp_time_s / responded : 0.0; }
    double avg_pk_time_s() const { return picked_up ? sum_pk_time_s / picked_up : 0.0; }
    double avg_detour_m() const { return pooled_riders ? sum_detour_m / pooled_riders : 0.0; }
    double avg_share_m() const { return pooled_riders ? sum_share_m / pooled_riders : 0.0; }
    double dist_total_km() const { return occupied_m / 1000.0; }
    double dist_save_km() const { return save_m / 1000.0; }
};

extern const char* const kMetricsHeader; // Table-style metrics CSV header

struct EventRow {
    double time_s = 0.0;
    std::string event;
    int order_id = -1;
    int vehicle_id = -1;
    NodeId node = -1;
    std::string detail;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<EventRow> events;
    std::vector<std::string> header; // provenance comment lines (# key=value)
    int vehicle_count = 0;
};

/// Full deterministic run: admits the given demand over the horizon, then
/// drains until every committed trip completes. Forward-looking strategies
/// need space/tables; avg_pickup_m is the calibrated mean pickup distance.
RunResult run_simulation(const RoadNetwork& net, const std::vector<Order>& demand,
                         const SimConfig& cfg, Strategy strategy,
                         const StateSpace* space = nullptr,
                         const PredictionTables* tables = nullptr, double avg_pickup_m = 0.0);

std::string metrics_csv(const RunResult& result);
void write_metrics_csv(const RunResult& result, const std::string& path);
void write_event_csv(const RunResult& result, const std::string& path);
std::vector<EventRow> parse_event_csv(const std::string& path);
std::map<std::string, std::string> parse_detail(const std::string& detail);

struct Pricing {
    double fare_solo_per_km = 5.0;
    double fare_shared_per_km = 3.5;
    double driver_pay_per_km = 2.0;
};

/// Recomputes platform profit from an event log alone.
double compute_profit(const std::vector<EventRow>& events, const Pricing& pricing);

std::uint64_t config_hash(const SimConfig& cfg);

} // namespace ridepool
