#include "ridepool/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ridepool/csv.hpp"

namespace ridepool {

const char* const kMetricsHeader =
    "response_rate,pairing_ratio,profit,avg_resp_time_s,avg_pk_time_s,avg_detour_m,"
    "avg_share_m,dist_total_km,dist_save_km";

namespace {

struct Stop {
    NodeId node;
    bool pickup;
    int order;
};

struct SimVehicle {
    int id = -1;
    NodeId node = -1;
    double node_time = 0.0;
    bool in_transit = false;
    LinkId transit_link = -1;
    double transit_arrival = 0.0;
    std::deque<Stop> stops;
    std::deque<LinkId> leg;
    int committed = 0;
    int onboard = 0;
    int order_a = -1; // first-committed order
    int order_b = -1;

    bool has_pool = false;
    double pool_saving = 0, pool_shared = 0;
    double pool_det1 = 0, pool_det2 = 0;
    double pool_ride1 = 0, pool_ride2 = 0;
    double pool_span = 0;
};

struct OrderRuntime {
    double assign_time = -1.0;
    double pickup_time = -1.0;
    int vehicle = -1;
};

class Simulation {
public:
    Simulation(const RoadNetwork& net, const std::vector<Order>& demand, const SimConfig& cfg,
               Strategy strategy, const StateSpace* space, const PredictionTables* tables,
               double avg_pickup_m)
        : net_(net), cfg_(cfg), strategy_(strategy),
          mobility_(cfg.seed, kStreamMobility), orders_(demand), runtime_(demand.size()) {
        ctx_.alpha = cfg.alpha;
        ctx_.r_w = cfg.r_w;
        ctx_.avg_pickup_m = avg_pickup_m;
        ctx_.k_rounds_pop = cfg.k_rounds_pop();
        ctx_.cfg = cfg.pairing();
        ctx_.net = &net_;
        ctx_.space = space;
        ctx_.tables = tables;

        const int n_vehicles =
            static_cast<int>(std::ceil(static_cast<double>(demand.size()) * cfg.drivers_per_order));
        RngStream init(cfg.seed, kStreamInit);
        vehicles_.resize(std::max(n_vehicles, 0));
        for (int v = 0; v < n_vehicles; ++v) {
            vehicles_[v].id = v;
            vehicles_[v].node =
                net_.nodes()[init.uniform_int(net_.node_count())];
            vehicles_[v].node_time = 0.0;
        }
    }

    RunResult run() {
        double t = 0.0;
        std::size_t next_arrival = 0;
        int round = 0;
        const double t_stop_guard = cfg_.horizon_s + 48.0 * 3600.0;
        while (true) {
            const double t_end = t + cfg_.dt_s;
            // (1) admit arrivals in (t, t_end]
            while (next_arrival < orders_.size() && orders_[next_arrival].arrival_s <= t_end) {
                const Order& o = orders_[next_arrival];
                ++metrics_.admitted;
                waiting_.push_back(o.id);
                event(o.arrival_s, "arrive", o.id, -1, o.od.origin,
                      "dest=" + std::to_string(o.od.destination) +
                          ";max_wait_s=" + format_double(o.max_wait_s));
                ++next_arrival;
            }
            // (2) cancellations
            for (auto it = waiting_.begin(); it != waiting_.end();) {
                Order& o = orders_[*it];
                if (t_end - o.arrival_s > o.max_wait_s) {
                    o.status = OrderStatus::cancelled;
                    ++metrics_.cancelled;
                    event(t_end, "cancel", o.id, -1, o.od.origin, "");
                    it = waiting_.erase(it);
                } else {
                    ++it;
                }
            }
            // (3) vehicle motion
            for (SimVehicle& v : vehicles_) advance(v, t_end);
            // (4)+(5) batch matching
            WorldSnapshot snap;
            snap.round = round;
            for (int id : waiting_) snap.waiting.push_back(&orders_[id]);
            for (const SimVehicle& v : vehicles_) {
                if (v.committed >= 2) continue;
                VehicleView view;
                view.id = v.id;
                view.node = v.node;
                view.committed = v.committed;
                if (v.committed == 1) {
                    view.onboard_order = v.order_a;
                    view.onboard_od = orders_[v.order_a].od;
                    view.pickup_pending = v.onboard == 0;
                }
                snap.vehicles.push_back(view);
            }
            BatchMatchResult result = dispatch_round(strategy_, snap, ctx_);
            // (6) apply
            for (const AssignmentDecision& d : result.assignments) {
                if (d.vehicle_id < 0) continue;
                SimVehicle& v = vehicles_[d.vehicle_id];
                if (d.pool_with_onboard)
                    apply_join(v, d.order_id, d.mode, t_end, d.pickup_m);
                else
                    apply_solo(v, d.order_id, t_end, d.pickup_m);
            }
            for (const PairTripDecision& p : result.pair_trips)
                apply_pair(vehicles_[p.vehicle_id], p, t_end);
            for (int id : waiting_)
                if (orders_[id].status == OrderStatus::waiting) ++orders_[id].rounds_waited;

            t = t_end;
            ++round;
            if (t >= cfg_.horizon_s && next_arrival >= orders_.size() && waiting_.empty() &&
                all_idle())
                break;
            if (t > t_stop_guard)
                throw std::logic_error("simulation failed to drain after the horizon");
        }

        metrics_.residual_waiting = static_cast<long>(waiting_.size());
        if (metrics_.admitted !=
            metrics_.responded + metrics_.cancelled + metrics_.residual_waiting)
            throw std::logic_error("conservation violation: admitted != responded"
                                   " + cancelled + residual");

        RunResult out;
        out.metrics = metrics_;
        out.events = std::move(events_);
        out.vehicle_count = static_cast<int>(vehicles_.size());
        out.header.push_back("# ridepool-run");
        out.header.push_back("# strategy=" + std::string(to_string(strategy_)));
        out.header.push_back("# seed=" + std::to_string(cfg_.seed));
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(config_hash(cfg_)));
        out.header.push_back("# config_hash=" + std::string(hex));
        out.header.push_back("# rng=" + std::string(RngStream::algorithm_name()) +
                             ";streams=init,demand,mobility");
        out.header.push_back("# vehicles=" + std::to_string(vehicles_.size()));
        return out;
    }

private:
    bool all_idle() const {
        for (const SimVehicle& v : vehicles_)
            if (v.committed != 0) return false;
        return true;
    }

    void event(double t, const char* name, int order, int vehicle, NodeId node,
               const std::string& detail) {
        events_.push_back({t, name, order, vehicle, node, detail});
    }

    void advance(SimVehicle& v, double until) {
        while (true) {
            if (v.in_transit) {
                if (v.transit_arrival > until) return;
                v.node = net_.link(v.transit_link).head;
                v.node_time = v.transit_arrival;
                v.in_transit = false;
                if (!v.leg.empty() && v.leg.front() == v.transit_link) v.leg.pop_front();
                exec_stops(v);
            } else {
                LinkId next = -1;
                if (!v.stops.empty()) {
                    if (v.leg.empty())
                        for (LinkId lid : net_.shortest_path_links(v.node, v.stops.front().node))
                            v.leg.push_back(lid);
                    next = v.leg.front();
                } else {
                    const auto& outs = net_.out_links(v.node);
                    if (outs.empty()) {
                        v.node_time = until;
                        return;
                    }
                    next = outs[mobility_.uniform_int(outs.size())];
                }
                v.in_transit = true;
                v.transit_link = next;
                v.transit_arrival = v.node_time + net_.link_travel_time_s(next);
            }
        }
    }

    void exec_stops(SimVehicle& v) {
        while (!v.stops.empty() && v.stops.front().node == v.node) {
            Stop s = v.stops.front();
            v.stops.pop_front();
            v.leg.clear();
            if (s.pickup)
                do_pickup(v, s.order);
            else
                do_dropoff(v, s.order);
        }
    }

    void do_pickup(SimVehicle& v, int order) {
        Order& o = orders_[order];
        OrderRuntime& rt = runtime_[order];
        rt.pickup_time = v.node_time;
        ++v.onboard;
        if (o.status == OrderStatus::dispatched) o.status = OrderStatus::picked_up_solo;
        ++metrics_.picked_up;
        metrics_.sum_pk_time_s += rt.pickup_time - rt.assign_time;
        event(v.node_time, "pickup", order, v.id, v.node, "");
    }

    void do_dropoff(SimVehicle& v, int order) {
        Order& o = orders_[order];
        o.status = OrderStatus::delivered;
        --v.onboard;
        double ride = v.has_pool ? (order == v.order_a ? v.pool_ride1 : v.pool_ride2)
                                 : o.od.length_m;
        event(v.node_time, "dropoff", order, v.id, v.node,
              std::string("kind=") + (v.has_pool ? "pool" : "solo") +
                  ";ride_m=" + format_double(ride));
        if (!v.stops.empty()) return;
        // trip complete
        if (v.has_pool) {
            metrics_.save_m += v.pool_saving;
            metrics_.occupied_m += v.pool_span;
            metrics_.sum_share_m += 2.0 * v.pool_shared;
            metrics_.sum_detour_m += v.pool_det1 + v.pool_det2;
            metrics_.pooled_riders += 2;
            metrics_.pairs += 1;
            double solo_part = (v.pool_ride1 - v.pool_shared) + (v.pool_ride2 - v.pool_shared);
            metrics_.fares += (cfg_.fare_shared_per_km * 2.0 * v.pool_shared +
                               cfg_.fare_solo_per_km * solo_part) /
                              1000.0;
            metrics_.driver_pay += cfg_.driver_pay_per_km * v.pool_span / 1000.0;
        } else {
            metrics_.occupied_m += o.od.length_m;
            metrics_.fares += cfg_.fare_solo_per_km * o.od.length_m / 1000.0;
            metrics_.driver_pay += cfg_.driver_pay_per_km * o.od.length_m / 1000.0;
        }
        v.committed = 0;
        v.onboard = 0;
        v.order_a = v.order_b = -1;
        v.has_pool = false;
    }

    void respond(int order, int vehicle, double t, double pickup_m, const char* kind) {
        Order& o = orders_[order];
        OrderRuntime& rt = runtime_[order];
        rt.assign_time = t;
        rt.vehicle = vehicle;
        ++metrics_.responded;
        metrics_.sum_resp_time_s += t - o.arrival_s;
        metrics_.sum_pickup_m += pickup_m;
        waiting_.erase(std::remove(waiting_.begin(), waiting_.end(), order), waiting_.end());
        event(t, "assign", order, vehicle, vehicles_[vehicle].node,
              std::string("kind=") + kind + ";pickup_m=" + format_double(pickup_m));
    }

    void reset_route(SimVehicle& v, double t) {
        v.stops.clear();
        v.leg.clear();
        v.in_transit = false;
        v.node_time = t;
    }

    void apply_solo(SimVehicle& v, int order, double t, double pickup_m) {
        if (v.committed != 0) throw std::logic_error("solo assignment to a busy vehicle");
        Order& o = orders_[order];
        reset_route(v, t);
        v.stops.push_back({o.od.origin, true, order});
        v.stops.push_back({o.od.destination, false, order});
        v.committed = 1;
        v.order_a = order;
        o.status = OrderStatus::dispatched;
        respond(order, v.id, t, pickup_m, "solo");
        exec_stops(v);
    }

    void commit_pool(SimVehicle& v, int first, int second, ServeMode mode, double t,
                     NodeId eval_loc) {
        const ODPair& f = orders_[first].od;
        const ODPair& s = orders_[second].od;
        PairGeometry g = best_pair_geometry(net_, f, s, eval_loc, cfg_.max_detour_m);
        if (!g.feasible || g.mode != mode)
            throw std::logic_error("pool commit geometry mismatch");
        v.has_pool = true;
        v.pool_saving = g.saving_m;
        v.pool_det1 = g.detour_first_m;
        v.pool_det2 = g.detour_second_m;
        v.pool_ride1 = g.detour_first_m + f.length_m;
        v.pool_ride2 = g.detour_second_m + s.length_m;
        v.pool_span = g.trip_len_m;
        v.pool_shared = mode == ServeMode::fofo
                            ? net_.shortest_distance(s.origin, f.destination)
                            : s.length_m;
        if (mode == ServeMode::fofo) {
            v.stops.push_back({f.destination, false, first});
            v.stops.push_back({s.destination, false, second});
        } else {
            v.stops.push_back({s.destination, false, second});
            v.stops.push_back({f.destination, false, first});
        }
        orders_[first].status = OrderStatus::paired;
        orders_[second].status = OrderStatus::paired;
        event(t, "pair", second, v.id, v.node,
              "first=" + std::to_string(first) + ";mode=" + to_string(mode) +
                  ";saving_m=" + format_double(g.saving_m) +
                  ";shared_m=" + format_double(v.pool_shared) +
                  ";detour_first_m=" + format_double(g.detour_first_m) +
                  ";detour_second_m=" + format_double(g.detour_second_m) +
                  ";ride_first_m=" + format_double(v.pool_ride1) +
                  ";ride_second_m=" + format_double(v.pool_ride2) +
                  ";span_m=" + format_double(v.pool_span));
    }

    void apply_join(SimVehicle& v, int order, ServeMode mode, double t, double pickup_m) {
        if (v.committed != 1) throw std::logic_error("join assignment to a non-partial vehicle");
        const int first = v.order_a;
        const bool first_aboard = v.onboard == 1;
        NodeId eval_loc = first_aboard ? v.node : orders_[first].od.origin;
        reset_route(v, t);
        if (!first_aboard) v.stops.push_back({orders_[first].od.origin, true, first});
        v.stops.push_back({orders_[order].od.origin, true, order});
        v.committed = 2;
        v.order_b = order;
        commit_pool(v, first, order, mode, t, eval_loc);
        respond(order, v.id, t, pickup_m, "join");
        exec_stops(v);
    }

    void apply_pair(SimVehicle& v, const PairTripDecision& p, double t) {
        if (v.committed != 0) throw std::logic_error("pair trip assigned to a busy vehicle");
        reset_route(v, t);
        v.stops.push_back({orders_[p.first_order].od.origin, true, p.first_order});
        v.stops.push_back({orders_[p.second_order].od.origin, true, p.second_order});
        v.committed = 2;
        v.order_a = p.first_order;
        v.order_b = p.second_order;
        commit_pool(v, p.first_order, p.second_order, p.mode, t,
                    orders_[p.first_order].od.origin);
        respond(p.first_order, v.id, t, p.pickup_first_m, "pair_first");
        respond(p.second_order, v.id, t, p.pickup_second_m, "pair_second");
        exec_stops(v);
    }

    const RoadNetwork& net_;
    SimConfig cfg_;
    Strategy strategy_;
    UtilityContext ctx_;
    RngStream mobility_;
    std::vector<Order> orders_;
    std::vector<OrderRuntime> runtime_;
    std::vector<SimVehicle> vehicles_;
    std::vector<int> waiting_; // order ids, ascending
    RunMetrics metrics_;
    std::vector<EventRow> events_;
};

} // namespace

RunResult run_simulation(const RoadNetwork& net, const std::vector<Order>& demand,
                         const SimConfig& cfg, Strategy strategy, const StateSpace* space,
                         const PredictionTables* tables, double avg_pickup_m) {
    Simulation sim(net, demand, cfg, strategy, space, tables, avg_pickup_m);
    return sim.run();
}

std::string metrics_csv(const RunResult& r) {
    std::ostringstream out;
    for (const auto& line : r.header) out << line << '\n';
    out << kMetricsHeader << '\n';
    const RunMetrics& m = r.metrics;
    out << format_double(m.response_rate()) << ',' << format_double(m.pairing_ratio()) << ','
        << format_double(m.profit()) << ',' << format_double(m.avg_resp_time_s()) << ','
        << format_double(m.avg_pk_time_s()) << ',' << format_double(m.avg_detour_m()) << ','
        << format_double(m.avg_share_m()) << ',' << format_double(m.dist_total_km()) << ','
        << format_double(m.dist_save_km()) << '\n';
    return out.str();
}

void write_metrics_csv(const RunResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << metrics_csv(r);
}

void write_event_csv(const RunResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    for (const auto& line : r.header) f << line << '\n';
    f << "time_s,event,order_id,vehicle_id,node,detail\n";
    for (const EventRow& e : r.events)
        f << format_double(e.time_s) << ',' << e.event << ',' << e.order_id << ','
          << e.vehicle_id << ',' << e.node << ',' << e.detail << '\n';
}

std::vector<EventRow> parse_event_csv(const std::string& path) {
    CsvReader csv(path);
    int t = csv.column("time_s"), ev = csv.column("event"), o = csv.column("order_id");
    int v = csv.column("vehicle_id"), n = csv.column("node"), d = csv.column("detail");
    std::vector<EventRow> rows;
    std::vector<std::string> row;
    while (csv.next(row)) {
        EventRow e;
        e.time_s = parse_double(row[t], "time_s");
        e.event = row[ev];
        e.order_id = static_cast<int>(parse_int(row[o], "order_id"));
        e.vehicle_id = static_cast<int>(parse_int(row[v], "vehicle_id"));
        e.node = static_cast<NodeId>(parse_int(row[n], "node"));
        e.detail = row[d];
        rows.push_back(e);
    }
    return rows;
}

std::map<std::string, std::string> parse_detail(const std::string& detail) {
    std::map<std::string, std::string> out;
    std::stringstream ss(detail);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto eq = item.find('=');
        if (eq != std::string::npos) out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

double compute_profit(const std::vector<EventRow>& events, const Pricing& pricing) {
    double fares = 0.0, pay = 0.0;
    for (const EventRow& e : events) {
        if (e.event == "pair") {
            auto d = parse_detail(e.detail);
            double shared = parse_double(d.at("shared_m"), "shared_m");
            double r1 = parse_double(d.at("ride_first_m"), "ride_first_m");
            double r2 = parse_double(d.at("ride_second_m"), "ride_second_m");
            double span = parse_double(d.at("span_m"), "span_m");
            fares += (pricing.fare_shared_per_km * 2.0 * shared +
                      pricing.fare_solo_per_km * ((r1 - shared) + (r2 - shared))) /
                     1000.0;
            pay += pricing.driver_pay_per_km * span / 1000.0;
        } else if (e.event == "dropoff") {
            auto d = parse_detail(e.detail);
            if (d.at("kind") == "solo") {
                double ride = parse_double(d.at("ride_m"), "ride_m");
                fares += pricing.fare_solo_per_km * ride / 1000.0;
                pay += pricing.driver_pay_per_km * ride / 1000.0;
            }
        }
    }
    return fares - pay;
}

std::uint64_t config_hash(const SimConfig& cfg) {
    std::ostringstream s;
    s << cfg.dt_s << '|' << cfg.horizon_s << '|' << cfg.drivers_per_order << '|' << cfg.speed_mps
      << '|' << cfg.max_wait_mean_s << '|' << cfg.max_wait_sd_s << '|' << cfg.alpha << '|'
      << cfg.r_w << '|' << cfg.max_pickup_m << '|' << cfg.max_detour_m << '|'
      << cfg.fare_solo_per_km << '|' << cfg.fare_shared_per_km << '|' << cfg.driver_pay_per_km
      << '|' << cfg.seed;
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ridepool
