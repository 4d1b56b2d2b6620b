#include "ridepool/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "ridepool/csv.hpp"

namespace ridepool {

void save_demand_csv(const DemandProfile& profile, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << "origin,destination,rate_per_s\n";
    for (const auto& e : profile.entries)
        f << e.origin << ',' << e.destination << ',' << format_double(e.rate_per_s) << '\n';
}

DemandProfile load_demand_csv(const std::string& path) {
    CsvReader csv(path);
    int o = csv.column("origin"), d = csv.column("destination"), r = csv.column("rate_per_s");
    DemandProfile p;
    std::vector<std::string> row;
    while (csv.next(row)) {
        DemandEntry e{static_cast<NodeId>(parse_int(row[o], "origin")),
                      static_cast<NodeId>(parse_int(row[d], "destination")),
                      parse_double(row[r], "rate_per_s")};
        if (e.rate_per_s < 0.0) csv.fail("negative rate");
        p.entries.push_back(e);
    }
    std::sort(p.entries.begin(), p.entries.end(), [](const auto& a, const auto& b) {
        return std::pair(a.origin, a.destination) < std::pair(b.origin, b.destination);
    });
    return p;
}

namespace {

// days since 1970-01-01 for a civil date (Hinnant's algorithm)
long long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

double parse_pickup_time(const std::string& s) {
    int y, mo, d, h, mi;
    double sec;
    char sep;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec) == 7 &&
        (sep == 'T' || sep == ' ')) {
        return static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 +
               mi * 60.0 + sec;
    }
    return parse_double(s, "pickup_time");
}

} // namespace

std::vector<TripLogRow> load_trip_log(const std::string& path) {
    CsvReader csv(path);
    int id = csv.column("order_id");
    int t = csv.column("pickup_time");
    int o = csv.column("origin_node");
    int d = csv.column("dest_node");
    std::vector<TripLogRow> rows;
    std::vector<std::string> row;
    while (csv.next(row)) {
        TripLogRow r;
        r.order_id = parse_int(row[id], "order_id");
        r.pickup_time_s = parse_pickup_time(row[t]);
        r.origin_node = static_cast<NodeId>(parse_int(row[o], "origin_node"));
        r.dest_node = static_cast<NodeId>(parse_int(row[d], "dest_node"));
        rows.push_back(r);
    }
    return rows;
}

void save_trip_log(const std::vector<TripLogRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << "order_id,pickup_time,origin_node,dest_node\n";
    for (const auto& r : rows)
        f << r.order_id << ',' << format_double(r.pickup_time_s) << ',' << r.origin_node << ','
          << r.dest_node << '\n';
}

DemandProfile ingest_demand(const std::vector<TripLogRow>& rows, const RoadNetwork& net,
                            double window_start_s, double period_s, double snap_radius_m,
                            IngestStats* stats) {
    IngestStats local;
    std::map<std::pair<NodeId, NodeId>, long> counts;
    for (const auto& r : rows) {
        ++local.rows;
        if (r.pickup_time_s < window_start_s || r.pickup_time_s >= window_start_s + period_s)
            continue;
        NodeId o = r.origin_node, d = r.dest_node;
        auto resolve = [&](NodeId id, double x, double y) -> NodeId {
            if (net.has_node(id)) return id;
            if (net.has_coordinates() && snap_radius_m > 0.0) {
                auto snapped = net.nearest_node(x, y, snap_radius_m);
                if (snapped) {
                    ++local.snapped;
                    return *snapped;
                }
            }
            return -1;
        };
        o = resolve(o, r.x, r.y);
        d = resolve(d, r.x, r.y);
        if (o < 0 || d < 0) {
            ++local.dropped_unknown_node;
            continue;
        }
        if (o == d) {
            ++local.dropped_same_od;
            continue;
        }
        ++counts[{o, d}];
    }
    DemandProfile p;
    for (const auto& [od, c] : counts)
        p.entries.push_back({od.first, od.second, static_cast<double>(c) / period_s});
    if (stats) *stats = local;
    return p;
}

namespace {

double draw_max_wait(RngStream& rng, double mean, double sd, double min_wait) {
    double w = rng.normal(mean, sd);
    return std::max(w, min_wait);
}

} // namespace

GeneratedDemand generate_poisson_orders(const DemandProfile& profile, double horizon_s,
                                        const RoadNetwork& net, RngStream& rng,
                                        double max_wait_mean_s, double max_wait_sd_s,
                                        double min_wait_s) {
    GeneratedDemand out;
    struct Arrival {
        double t;
        int od_slot;
        int seq;
    };
    std::vector<Arrival> arrivals;
    std::vector<ODPair> ods;
    for (const auto& e : profile.entries) {
        if (e.rate_per_s <= 0.0) continue;
        if (e.origin == e.destination || !net.has_node(e.origin) || !net.has_node(e.destination) ||
            !net.reachable(e.origin, e.destination)) {
            ++out.skipped_od;
            continue;
        }
        int slot = static_cast<int>(ods.size());
        ods.push_back(make_od_pair(net, e.origin, e.destination));
        double t = rng.exponential(e.rate_per_s);
        int seq = 0;
        while (t < horizon_s) {
            arrivals.push_back({t, slot, seq++});
            t += rng.exponential(e.rate_per_s);
        }
    }
    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.od_slot != b.od_slot) return a.od_slot < b.od_slot;
        return a.seq < b.seq;
    });
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        Order o;
        o.id = static_cast<int>(i);
        o.od = ods[arrivals[i].od_slot];
        o.arrival_s = arrivals[i].t;
        o.max_wait_s = draw_max_wait(rng, max_wait_mean_s, max_wait_sd_s, min_wait_s);
        out.orders.push_back(std::move(o));
    }
    return out;
}

GeneratedDemand replay_orders(const std::vector<TripLogRow>& rows, double window_start_s,
                              double horizon_s, const RoadNetwork& net, RngStream& rng,
                              double max_wait_mean_s, double max_wait_sd_s, double min_wait_s) {
    GeneratedDemand out;
    std::vector<TripLogRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const TripLogRow& a, const TripLogRow& b) {
                         return a.pickup_time_s < b.pickup_time_s;
                     });
    for (const auto& r : sorted) {
        double t = r.pickup_time_s - window_start_s;
        if (t < 0.0 || t >= horizon_s) continue;
        if (!net.has_node(r.origin_node) || !net.has_node(r.dest_node) ||
            r.origin_node == r.dest_node || !net.reachable(r.origin_node, r.dest_node)) {
            ++out.skipped_od;
            continue;
        }
        Order o;
        o.id = static_cast<int>(out.orders.size());
        o.od = make_od_pair(net, r.origin_node, r.dest_node);
        o.arrival_s = t;
        o.max_wait_s = draw_max_wait(rng, max_wait_mean_s, max_wait_sd_s, min_wait_s);
        out.orders.push_back(std::move(o));
    }
    return out;
}

} // namespace ridepool
