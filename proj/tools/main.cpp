#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ridepool/csv.hpp"
#include "ridepool/oracle.hpp"
#include "ridepool/scenario.hpp"

using namespace ridepool;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    long long seed = -1;
    std::string strategy;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file (key = value lines)");
    cmd->add_option("--set", opts.overrides, "override a scenario key, KEY=VALUE")
        ->type_name("KEY=VALUE");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "rng seed (overrides config)");
    cmd->add_option("--strategy", opts.strategy,
                    "dispatch strategy: np|mb|rtv|fl|fl-no-delay|fl-naive");
}

ScenarioConfig resolve(const CommonOpts& opts) {
    ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = load_scenario(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParseError("--set expects KEY=VALUE, got '" + kv + "'");
        apply_scenario_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.strategy.empty()) cfg.strategy = opts.strategy;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

Strategy parse_strategy(const std::string& name) {
    auto s = strategy_from_string(name);
    if (!s) throw ParseError("unknown strategy '" + name + "'");
    return *s;
}

std::vector<std::uint64_t> seed_list(const ScenarioConfig& cfg) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < std::max(cfg.seeds, 1); ++i) seeds.push_back(cfg.sim.seed + i);
    return seeds;
}

std::optional<PredictArtifacts> maybe_tables(const ScenarioConfig& cfg, const RoadNetwork& net,
                                             const DemandProfile& profile, bool needed) {
    if (!needed) return std::nullopt;
    // tables are recomputed from the demand profile; a stored tables file is
    // validated against it when given
    PredictArtifacts art = predict_tables(net, profile, cfg.sim.pairing());
    return art;
}

int cmd_gen_network(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    RoadNetwork net = scenario_network(cfg);
    std::filesystem::path dir(cfg.out_dir);
    net.save_csv((dir / "nodes.csv").string(), (dir / "links.csv").string());
    std::cout << "wrote " << (dir / "nodes.csv").string() << " (" << net.node_count()
              << " nodes), " << (dir / "links.csv").string() << " (" << net.link_count()
              << " links)\n";
    return 0;
}

int cmd_predict(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    RoadNetwork net = scenario_network(cfg);
    DemandProfile profile = scenario_demand(cfg, net);
    PredictArtifacts art = predict_tables(net, profile, cfg.sim.pairing());
    std::filesystem::path out =
        cfg.tables_path.empty() ? std::filesystem::path(cfg.out_dir) / "tables.csv"
                                : std::filesystem::path(cfg.tables_path);
    save_tables(art.space, art.tables, out.string());
    std::cout << "solved " << art.space.ods.size() << " seeker states / "
              << art.space.takers.size() << " taker states in " << art.tables.iterations
              << " iterations; residual " << art.tables.residual << "; clipped "
              << art.tables.clip_events << " rho evaluations\n"
              << "tables written to " << out.string() << '\n';
    return 0;
}

int cmd_simulate(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    Strategy strategy = parse_strategy(cfg.strategy);
    RoadNetwork net = scenario_network(cfg);
    DemandProfile profile = scenario_demand(cfg, net);
    const bool fl = strategy == Strategy::fl || strategy == Strategy::fl_no_delay ||
                    strategy == Strategy::fl_naive;
    std::optional<PredictArtifacts> art;
    try {
        art = maybe_tables(cfg, net, profile, fl);
    } catch (const std::exception& e) {
        std::cerr << "error: prediction tables unavailable for strategy '" << cfg.strategy
                  << "': " << e.what() << "\nrun `ridepool predict` against this scenario first"
                  << std::endl;
        return 1;
    }
    std::vector<Order> orders = make_orders(profile, net, cfg.sim);
    double avg_pickup = fl ? calibrate_avg_pickup(net, orders, cfg.sim) : 0.0;
    RunResult r = run_strategy(net, orders, cfg.sim, strategy, art ? &*art : nullptr, avg_pickup);

    std::filesystem::path dir(cfg.out_dir);
    write_metrics_csv(r, (dir / "metrics.csv").string());
    write_event_csv(r, (dir / "events.csv").string());
    std::cout << metrics_csv(r);
    return 0;
}

int cmd_oracle(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    RoadNetwork net = scenario_network(cfg);
    DemandProfile profile = scenario_demand(cfg, net);
    std::vector<Order> orders = make_orders(profile, net, cfg.sim);
    std::vector<OfflineOrder> offline;
    for (const Order& o : orders) offline.push_back({o.id, o.arrival_s, o.od});
    std::optional<double> gap;
    if (cfg.max_arrival_gap_s >= 0.0) gap = cfg.max_arrival_gap_s;
    OfflineInstance inst = build_offline_instance(offline, net, cfg.sim.pairing(), gap);
    OracleSolution o1 = solve_oracle1(inst);
    OracleSolution o2 = solve_oracle2(inst);
    std::filesystem::path dir(cfg.out_dir);
    write_pairing_csv(inst, o1, (dir / "oracle1_pairs.csv").string());
    write_pairing_csv(inst, o2, (dir / "oracle2_pairs.csv").string());
    std::cout << "orders," << offline.size() << "\n"
              << "oracle1_total_saving_km," << format_double(o1.total_saving_m / 1000.0) << "\n"
              << "oracle1_pairing_ratio," << format_double(o1.pairing_ratio) << "\n"
              << "oracle2_total_saving_km," << format_double(o2.total_saving_m / 1000.0) << "\n"
              << "oracle2_pairing_ratio," << format_double(o2.pairing_ratio) << "\n";
    return 0;
}

int cmd_compare(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    RoadNetwork net = scenario_network(cfg);
    DemandProfile profile = scenario_demand(cfg, net);
    std::vector<Strategy> strategies = {Strategy::np, Strategy::mb, Strategy::rtv, Strategy::fl,
                                        Strategy::fl_no_delay};
    PredictArtifacts art = predict_tables(net, profile, cfg.sim.pairing());
    auto rows = run_compare(net, profile, cfg.sim, strategies, seed_list(cfg), &art);
    std::string csv = compare_csv(rows);
    std::filesystem::path out = std::filesystem::path(cfg.out_dir) / "compare.csv";
    std::ofstream f(out);
    f << csv;
    std::cout << csv;
    return 0;
}

int cmd_sweep(const CommonOpts& common, const std::string& axis_name,
              const std::vector<double>& values) {
    ScenarioConfig cfg = resolve(common);
    auto axis = sweep_axis_from_string(axis_name);
    if (!axis) throw ParseError("unknown sweep axis '" + axis_name + "' (K|r_w|dt|ratio)");
    RoadNetwork net = scenario_network(cfg);
    DemandProfile profile = scenario_demand(cfg, net);
    std::vector<Strategy> strategies = {Strategy::mb, Strategy::rtv, Strategy::fl};
    PredictArtifacts art = predict_tables(net, profile, cfg.sim.pairing());
    auto rows = run_sweep(net, profile, cfg.sim, *axis, values, strategies, seed_list(cfg), &art);
    std::string csv = sweep_csv(*axis, rows);
    std::filesystem::path out =
        std::filesystem::path(cfg.out_dir) / ("sweep_" + std::string(to_string(*axis)) + ".csv");
    std::ofstream f(out);
    f << csv;
    std::cout << csv;
    return 0;
}

int cmd_benchmark(const CommonOpts& common) {
    ScenarioConfig cfg = resolve(common);
    Benchmark b = desk_benchmark(cfg.sim.seed);
    std::filesystem::path dir(cfg.out_dir);
    b.net.save_csv((dir / "nodes.csv").string(), (dir / "links.csv").string());
    save_demand_csv(b.profile, (dir / "demand.csv").string());
    std::ofstream f(dir / "scenario.cfg");
    f << "nodes_csv = " << (dir / "nodes.csv").string() << "\n"
      << "links_csv = " << (dir / "links.csv").string() << "\n"
      << "demand_csv = " << (dir / "demand.csv").string() << "\n"
      << "horizon_s = " << b.sim.horizon_s << "\n"
      << "seed = " << b.sim.seed << "\n";
    std::cout << "benchmark scenario written under " << dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale dynamic ride-pooling dispatch toolkit"};
    app.require_subcommand(1);

    CommonOpts gen_o, pred_o, sim_o, ora_o, cmp_o, swp_o, bench_o;
    auto* gen = app.add_subcommand("gen-network", "generate a grid network as CSV");
    add_common(gen, gen_o);
    auto* pred = app.add_subcommand("predict", "solve the seeker/taker system, save tables");
    add_common(pred, pred_o);
    auto* sim = app.add_subcommand("simulate", "run one (strategy, seed) simulation");
    add_common(sim, sim_o);
    auto* ora = app.add_subcommand("oracle", "solve the offline pairing bounds");
    add_common(ora, ora_o);
    auto* cmp = app.add_subcommand("compare", "run all strategies on identical seeds");
    add_common(cmp, cmp_o);
    auto* swp = app.add_subcommand("sweep", "sweep one parameter axis");
    add_common(swp, swp_o);
    std::string axis;
    std::vector<double> values;
    swp->add_option("axis", axis, "K|r_w|dt|ratio")->required();
    swp->add_option("values", values, "axis values")->required();
    auto* bench = app.add_subcommand("benchmark", "write the bundled desk benchmark scenario");
    add_common(bench, bench_o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed()) return cmd_gen_network(gen_o);
        if (pred->parsed()) return cmd_predict(pred_o);
        if (sim->parsed()) return cmd_simulate(sim_o);
        if (ora->parsed()) return cmd_oracle(ora_o);
        if (cmp->parsed()) return cmd_compare(cmp_o);
        if (swp->parsed()) return cmd_sweep(swp_o, axis, values);
        if (bench->parsed()) return cmd_benchmark(bench_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
