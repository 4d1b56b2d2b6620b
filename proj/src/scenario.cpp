#include "ridepool/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ridepool/csv.hpp"

namespace ridepool {

void apply_scenario_kv(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    auto d = [&] { return parse_double(value, key.c_str()); };
    auto i = [&] { return static_cast<int>(parse_int(value, key.c_str())); };
    if (key == "dt_s") cfg.sim.dt_s = d();
    else if (key == "horizon_s") cfg.sim.horizon_s = d();
    else if (key == "drivers_per_order") cfg.sim.drivers_per_order = d();
    else if (key == "speed_kmh") cfg.sim.speed_mps = d() * 1000.0 / 3600.0;
    else if (key == "max_wait_mean_s") cfg.sim.max_wait_mean_s = d();
    else if (key == "max_wait_sd_s") cfg.sim.max_wait_sd_s = d();
    else if (key == "alpha") cfg.sim.alpha = d();
    else if (key == "r_w") cfg.sim.r_w = d();
    else if (key == "max_pickup_m") cfg.sim.max_pickup_m = d();
    else if (key == "max_detour_m") cfg.sim.max_detour_m = d();
    else if (key == "fare_solo_per_km") cfg.sim.fare_solo_per_km = d();
    else if (key == "fare_shared_per_km") cfg.sim.fare_shared_per_km = d();
    else if (key == "driver_pay_per_km") cfg.sim.driver_pay_per_km = d();
    else if (key == "seed") cfg.sim.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
    else if (key == "strategy") cfg.strategy = value;
    else if (key == "nodes_csv") cfg.nodes_csv = value;
    else if (key == "links_csv") cfg.links_csv = value;
    else if (key == "grid_rows") cfg.grid_rows = i();
    else if (key == "grid_cols") cfg.grid_cols = i();
    else if (key == "grid_link_m") cfg.grid_link_m = d();
    else if (key == "demand_csv") cfg.demand_csv = value;
    else if (key == "trip_log") cfg.trip_log = value;
    else if (key == "window_start_s") cfg.window_start_s = d();
    else if (key == "tables") cfg.tables_path = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seeds") cfg.seeds = i();
    else if (key == "snap_radius_m") cfg.snap_radius_m = d();
    else if (key == "max_arrival_gap_s") cfg.max_arrival_gap_s = d();
    else throw ParseError("unknown scenario key '" + key + "'");
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    ScenarioConfig cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = line.substr(0, line.find('#'));
        auto first = stripped.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        try {
            apply_scenario_kv(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        } catch (const ParseError& err) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    return cfg;
}

RoadNetwork scenario_network(const ScenarioConfig& cfg) {
    if (cfg.grid_rows > 0 && cfg.grid_cols > 0)
        return RoadNetwork::grid(cfg.grid_rows, cfg.grid_cols, cfg.grid_link_m,
                                 cfg.sim.speed_mps);
    if (cfg.nodes_csv.empty() || cfg.links_csv.empty())
        throw std::invalid_argument("scenario needs either grid_rows/grid_cols or network CSVs");
    return RoadNetwork::load_csv(cfg.nodes_csv, cfg.links_csv, cfg.sim.speed_mps);
}

DemandProfile scenario_demand(const ScenarioConfig& cfg, const RoadNetwork& net) {
    if (!cfg.demand_csv.empty()) return load_demand_csv(cfg.demand_csv);
    if (!cfg.trip_log.empty()) {
        auto rows = load_trip_log(cfg.trip_log);
        return ingest_demand(rows, net, cfg.window_start_s, 3600.0, cfg.snap_radius_m);
    }
    throw std::invalid_argument("scenario needs demand_csv or trip_log");
}

Benchmark desk_benchmark(std::uint64_t seed) {
    Benchmark b{RoadNetwork::grid(10, 10, 500.0, 30000.0 / 3600.0), {}, {}};
    // eight hotspot flows sharing the central corridors
    const std::pair<NodeId, NodeId> hotspots[8] = {
        {40, 49}, {41, 48}, {4, 94}, {14, 84}, {40, 94}, {4, 49}, {22, 77}, {72, 27},
    };
    for (auto [o, d] : hotspots) b.profile.entries.push_back({o, d, 50.0 / 3600.0});
    std::sort(b.profile.entries.begin(), b.profile.entries.end(), [](auto& x, auto& y) {
        return std::pair(x.origin, x.destination) < std::pair(y.origin, y.destination);
    });
    b.sim.horizon_s = 7200.0;
    b.sim.seed = seed;
    return b;
}

PredictArtifacts predict_tables(const RoadNetwork& net, const DemandProfile& profile,
                                const PairingConfig& cfg, const FixedPointOptions& opt) {
    PredictArtifacts art;
    std::vector<ODPair> ods;
    std::vector<double> lambda;
    for (const auto& e : profile.entries) {
        if (e.rate_per_s <= 0.0) continue;
        if (!net.has_node(e.origin) || !net.has_node(e.destination) ||
            e.origin == e.destination || !net.reachable(e.origin, e.destination))
            continue;
        ods.push_back(make_od_pair(net, e.origin, e.destination));
        lambda.push_back(e.rate_per_s);
    }
    art.space = build_state_space(net, std::move(ods), cfg);
    art.tables = solve_fixed_point(art.space, lambda, opt);
    return art;
}

std::vector<Order> make_orders(const DemandProfile& profile, const RoadNetwork& net,
                               const SimConfig& cfg) {
    RngStream demand(cfg.seed, kStreamDemand);
    return generate_poisson_orders(profile, cfg.horizon_s, net, demand, cfg.max_wait_mean_s,
                                   cfg.max_wait_sd_s, cfg.dt_s)
        .orders;
}

double calibrate_avg_pickup(const RoadNetwork& net, const std::vector<Order>& orders,
                            const SimConfig& cfg) {
    RunResult mb = run_simulation(net, orders, cfg, Strategy::mb);
    if (mb.metrics.responded == 0) return 0.0;
    return mb.metrics.sum_pickup_m / static_cast<double>(mb.metrics.responded);
}

RunResult run_strategy(const RoadNetwork& net, const std::vector<Order>& orders,
                       const SimConfig& cfg, Strategy strategy, const PredictArtifacts* pred,
                       double avg_pickup_m) {
    const StateSpace* space = pred ? &pred->space : nullptr;
    const PredictionTables* tables = pred ? &pred->tables : nullptr;
    return run_simulation(net, orders, cfg, strategy, space, tables, avg_pickup_m);
}

std::vector<CompareRow> run_compare(const RoadNetwork& net, const DemandProfile& profile,
                                    const SimConfig& base, const std::vector<Strategy>& strategies,
                                    const std::vector<std::uint64_t>& seeds,
                                    const PredictArtifacts* pred) {
    std::vector<CompareRow> rows;
    for (std::uint64_t seed : seeds) {
        SimConfig cfg = base;
        cfg.seed = seed;
        // one demand stream per seed, shared by every strategy
        std::vector<Order> orders = make_orders(profile, net, cfg);
        double avg_pickup = calibrate_avg_pickup(net, orders, cfg);
        for (Strategy s : strategies) {
            RunResult r = run_strategy(net, orders, cfg, s, pred, avg_pickup);
            rows.push_back({s, seed, false, r.metrics});
        }
    }
    // seed means per strategy
    std::vector<CompareRow> out;
    for (Strategy s : strategies) {
        RunMetrics mean;
        int count = 0;
        for (const auto& row : rows) {
            if (row.strategy != s) continue;
            out.push_back(row);
            const RunMetrics& m = row.metrics;
            mean.admitted += m.admitted;
            mean.responded += m.responded;
            mean.cancelled += m.cancelled;
            mean.pooled_riders += m.pooled_riders;
            mean.picked_up += m.picked_up;
            mean.pairs += m.pairs;
            mean.sum_resp_time_s += m.sum_resp_time_s;
            mean.sum_pk_time_s += m.sum_pk_time_s;
            mean.sum_pickup_m += m.sum_pickup_m;
            mean.sum_detour_m += m.sum_detour_m;
            mean.sum_share_m += m.sum_share_m;
            mean.occupied_m += m.occupied_m;
            mean.save_m += m.save_m;
            mean.fares += m.fares;
            mean.driver_pay += m.driver_pay;
            ++count;
        }
        if (count == 0) continue;
        // pooled accumulators divide once so ratio-style metrics stay exact means
        mean.save_m /= count;
        mean.occupied_m /= count;
        mean.fares /= count;
        mean.driver_pay /= count;
        CompareRow m2{s, 0, true, mean};
        out.push_back(m2);
    }
    return out;
}

namespace {

void metrics_fields(std::ostringstream& os, const RunMetrics& m) {
    os << format_double(m.response_rate()) << ',' << format_double(m.pairing_ratio()) << ','
       << format_double(m.profit()) << ',' << format_double(m.avg_resp_time_s()) << ','
       << format_double(m.avg_pk_time_s()) << ',' << format_double(m.avg_detour_m()) << ','
       << format_double(m.avg_share_m()) << ',' << format_double(m.dist_total_km()) << ','
       << format_double(m.dist_save_km());
}

} // namespace

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << "strategy,seed," << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        os << to_string(r.strategy) << ',' << (r.is_mean ? "mean" : std::to_string(r.seed))
           << ',';
        metrics_fields(os, r.metrics);
        os << '\n';
    }
    return os.str();
}

const char* to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::max_wait_mean: return "K";
    case SweepAxis::r_w: return "r_w";
    case SweepAxis::dt: return "dt";
    case SweepAxis::ratio: return "ratio";
    }
    return "?";
}

std::optional<SweepAxis> sweep_axis_from_string(const std::string& s) {
    if (s == "K" || s == "max_wait_mean") return SweepAxis::max_wait_mean;
    if (s == "r_w") return SweepAxis::r_w;
    if (s == "dt") return SweepAxis::dt;
    if (s == "ratio") return SweepAxis::ratio;
    return std::nullopt;
}

std::vector<SweepRow> run_sweep(const RoadNetwork& net, const DemandProfile& profile,
                                const SimConfig& base, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<Strategy>& strategies,
                                const std::vector<std::uint64_t>& seeds,
                                const PredictArtifacts* pred) {
    std::vector<SweepRow> out;
    for (double value : values) {
        SimConfig cfg = base;
        switch (axis) {
        case SweepAxis::max_wait_mean: cfg.max_wait_mean_s = value; break;
        case SweepAxis::r_w: cfg.r_w = value; break;
        case SweepAxis::dt: cfg.dt_s = value; break;
        case SweepAxis::ratio: cfg.drivers_per_order = value; break;
        }
        auto rows = run_compare(net, profile, cfg, strategies, seeds, pred);
        for (auto& r : rows) out.push_back({value, r});
    }
    return out;
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "axis,value,strategy,seed," << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        os << to_string(axis) << ',' << format_double(r.axis_value) << ','
           << to_string(r.run.strategy) << ','
           << (r.run.is_mean ? "mean" : std::to_string(r.run.seed)) << ',';
        metrics_fields(os, r.run.metrics);
        os << '\n';
    }
    return os.str();
}

} // namespace ridepool
