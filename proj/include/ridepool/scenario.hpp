#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"
#include "ridepool/prediction.hpp"
#include "ridepool/simulator.hpp"
#include "ridepool/strategies.hpp"

namespace ridepool {

/// Flat key=value scenario file plus CLI overrides. Paths are optional; a grid
/// network can be generated in place of files.
struct ScenarioConfig {
    SimConfig sim;
    std::string strategy = "mb";
    std::string nodes_csv, links_csv;
    int grid_rows = 0, grid_cols = 0;
    double grid_link_m = 500.0;
    std::string demand_csv; // OD rate profile
    std::string trip_log;   // or raw trip log
    double window_start_s = 0.0;
    std::string tables_path;
    std::string out_dir = ".";
    int seeds = 5;
    double snap_radius_m = 0.0;
    double max_arrival_gap_s = -1.0; // oracle extension, off when negative
};

ScenarioConfig load_scenario(const std::string& path);
// throws on unknown keys; used by both the file loader and CLI overrides
void apply_scenario_kv(ScenarioConfig& cfg, const std::string& key, const std::string& value);

RoadNetwork scenario_network(const ScenarioConfig& cfg);
DemandProfile scenario_demand(const ScenarioConfig& cfg, const RoadNetwork& net);

/// The bundled synthetic benchmark: 10x10 grid with 500 m links, eight
/// overlapping OD hotspots, two-hour horizon, defaults everywhere else.
struct Benchmark {
    RoadNetwork net;
    DemandProfile profile;
    SimConfig sim;
};
Benchmark desk_benchmark(std::uint64_t seed = 1);

struct PredictArtifacts {
    StateSpace space;
    PredictionTables tables;
};
PredictArtifacts predict_tables(const RoadNetwork& net, const DemandProfile& profile,
                                const PairingConfig& cfg, const FixedPointOptions& opt = {});

std::vector<Order> make_orders(const DemandProfile& profile, const RoadNetwork& net,
                               const SimConfig& cfg);

/// Mean realized pickup distance of a myopic batch run on the same demand;
/// feeds the wait-option cost of the forward-looking strategies.
double calibrate_avg_pickup(const RoadNetwork& net, const std::vector<Order>& orders,
                            const SimConfig& cfg);

RunResult run_strategy(const RoadNetwork& net, const std::vector<Order>& orders,
                       const SimConfig& cfg, Strategy strategy, const PredictArtifacts* pred,
                       double avg_pickup_m);

struct CompareRow {
    Strategy strategy;
    std::uint64_t seed; // 0 with is_mean set
    bool is_mean = false;
    RunMetrics metrics;
};

/// Runs every strategy against the identical per-seed demand stream; appends a
/// seed-mean row per strategy.
std::vector<CompareRow> run_compare(const RoadNetwork& net, const DemandProfile& profile,
                                    const SimConfig& base, const std::vector<Strategy>& strategies,
                                    const std::vector<std::uint64_t>& seeds,
                                    const PredictArtifacts* pred);

std::string compare_csv(const std::vector<CompareRow>& rows);

enum class SweepAxis { max_wait_mean, r_w, dt, ratio };
const char* to_string(SweepAxis a);
std::optional<SweepAxis> sweep_axis_from_string(const std::string& s);

struct SweepRow {
    double axis_value;
    CompareRow run;
};

std::vector<SweepRow> run_sweep(const RoadNetwork& net, const DemandProfile& profile,
                                const SimConfig& base, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<Strategy>& strategies,
                                const std::vector<std::uint64_t>& seeds,
                                const PredictArtifacts* pred);

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows);

} // namespace ridepool
