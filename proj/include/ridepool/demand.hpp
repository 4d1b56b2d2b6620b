#pragma once

#include <string>
#include <vector>

#include "ridepool/domain.hpp"
#include "ridepool/network.hpp"
#include "ridepool/rng.hpp"

namespace ridepool {

struct DemandEntry {
    NodeId origin = -1;
    NodeId destination = -1;
    double rate_per_s = 0.0; // Poisson arrival rate within the study period
};

struct DemandProfile {
    std::vector<DemandEntry> entries; // sorted by (origin, destination)

    double total_rate() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.rate_per_s;
        return s;
    }
};

void save_demand_csv(const DemandProfile& profile, const std::string& path);
DemandProfile load_demand_csv(const std::string& path);

struct TripLogRow {
    long long order_id = 0;
    double pickup_time_s = 0.0; // epoch seconds or seconds from window start
    NodeId origin_node = -1;
    NodeId dest_node = -1;
    double x = 0.0, y = 0.0; // optional coordinates when nodes are absent
    bool has_coords = false;
};

// trip log CSV: order_id,pickup_time,origin_node,dest_node
// pickup_time accepts epoch/relative seconds or ISO-8601 (YYYY-MM-DD[T ]HH:MM:SS).
std::vector<TripLogRow> load_trip_log(const std::string& path);
void save_trip_log(const std::vector<TripLogRow>& rows, const std::string& path);

struct IngestStats {
    long rows = 0;
    long dropped_unknown_node = 0;
    long snapped = 0;
    long dropped_same_od = 0;
};

/// Average per-OD demand rates for one study period: count / period length.
/// Unknown nodes are snapped to the nearest network node within snap_radius_m
/// when the network carries coordinates (and the row does), else dropped.
DemandProfile ingest_demand(const std::vector<TripLogRow>& rows, const RoadNetwork& net,
                            double window_start_s, double period_s, double snap_radius_m,
                            IngestStats* stats = nullptr);

struct GeneratedDemand {
    std::vector<Order> orders; // sorted by arrival, ids 0..n-1
    long skipped_od = 0;       // ODs dropped (unresolvable or zero-length)
};

/// Poisson arrivals per OD over [0, horizon_s), max-wait drawn per order from
/// a normal truncated below at min_wait_s. Deterministic for a given stream.
GeneratedDemand generate_poisson_orders(const DemandProfile& profile, double horizon_s,
                                        const RoadNetwork& net, RngStream& demand_stream,
                                        double max_wait_mean_s, double max_wait_sd_s,
                                        double min_wait_s);

/// Exact replay of a trip log (times taken relative to window_start_s);
/// max-wait still drawn from the demand stream.
GeneratedDemand replay_orders(const std::vector<TripLogRow>& rows, double window_start_s,
                              double horizon_s, const RoadNetwork& net, RngStream& demand_stream,
                              double max_wait_mean_s, double max_wait_sd_s, double min_wait_s);

} // namespace ridepool
