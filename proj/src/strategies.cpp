#include "ridepool/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ridepool {

const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::np: return "np";
    case Strategy::mb: return "mb";
    case Strategy::rtv: return "rtv";
    case Strategy::fl: return "fl";
    case Strategy::fl_no_delay: return "fl-no-delay";
    case Strategy::fl_naive: return "fl-naive";
    }
    return "?";
}

std::optional<Strategy> strategy_from_string(const std::string& s) {
    if (s == "np") return Strategy::np;
    if (s == "mb") return Strategy::mb;
    if (s == "rtv") return Strategy::rtv;
    if (s == "fl") return Strategy::fl;
    if (s == "fl-no-delay") return Strategy::fl_no_delay;
    if (s == "fl-naive") return Strategy::fl_naive;
    return std::nullopt;
}

int UtilityContext::od_index(const ODPair& od) const {
    if (!space) return -1;
    return space->find_od(od.origin, od.destination);
}

namespace {

int rounds_budget(const Order& order, const PairingConfig& cfg) {
    return static_cast<int>(std::ceil(order.max_wait_s / cfg.batch_interval_s));
}

double table_e_vacant(const Order& order, const UtilityContext& ctx) {
    int w = ctx.od_index(order.od);
    if (w < 0 || !ctx.tables) return 0.0;
    return ctx.tables->e_vacant_m[w];
}

double wait_value(const Order& order, const UtilityContext& ctx) {
    int w = ctx.od_index(order.od);
    if (w < 0 || !ctx.tables) return 0.0;
    // Eq.-10 window uses the population rounds budget; passengers who drew a
    // longer personal budget are past the window, where the value is zero.
    int k = std::min(order.rounds_waited, ctx.k_rounds_pop);
    return expected_saving_wait(*ctx.tables, w, k, ctx.r_w, ctx.k_rounds_pop);
}

} // namespace

double utility_myopic(const Order& order, const VehicleCandidate& cand,
                      const UtilityContext& ctx) {
    (void)ctx;
    (void)order;
    return cand.partial ? cand.geometry.saving_m - cand.pickup_m : -cand.pickup_m;
}

double utility_fl_vehicle(const Order& order, const VehicleCandidate& cand,
                          const UtilityContext& ctx) {
    const double value = cand.partial ? cand.geometry.saving_m : table_e_vacant(order, ctx);
    if (value <= 0.0) return 0.0;
    return value * (value / (value + cand.pickup_m)) *
           std::pow(ctx.alpha, order.rounds_waited);
}

double utility_fl_wait(const Order& order, const UtilityContext& ctx) {
    return wait_value(order, ctx) - ctx.avg_pickup_m;
}

double utility_fl_no_delay(const Order& order, const VehicleCandidate& cand,
                           const UtilityContext& ctx) {
    const double value = cand.partial ? cand.geometry.saving_m : table_e_vacant(order, ctx);
    return value - cand.pickup_m;
}

double utility_naive_vehicle(const Order& order, const VehicleCandidate& cand,
                             const UtilityContext& ctx) {
    return utility_fl_no_delay(order, cand, ctx);
}

double utility_naive_wait(const Order& order, const UtilityContext& ctx) {
    return utility_fl_wait(order, ctx);
}

PairTripGeometry pair_trip_geometry(const RoadNetwork& net, const ODPair& a, const ODPair& b,
                                    const PairingConfig& cfg) {
    PairTripGeometry out;
    const ODPair* ods[2] = {&a, &b};
    for (int first = 0; first < 2; ++first) {
        const ODPair& f = *ods[first];
        const ODPair& s = *ods[1 - first];
        if (!net.reachable(f.origin, s.origin)) continue;
        if (!(net.shortest_distance(f.origin, s.origin) < cfg.max_pickup_m)) continue;
        PairGeometry g = best_pair_geometry(net, f, s, f.origin, cfg.max_detour_m);
        if (!g.feasible) continue;
        if (!out.feasible || g.saving_m > out.saving_m) {
            out.feasible = true;
            out.first = first;
            out.mode = g.mode;
            out.saving_m = g.saving_m;
        }
    }
    return out;
}

namespace {

struct EdgeBuild {
    std::vector<VehicleCandidate> cands; // aligned with options below (vehicle edges)
    AssignProblem problem;
    std::vector<std::vector<double>> raw; // raw utility per option
    std::vector<std::vector<int>> cand_index;
};

// Bipartite strategies share one scaffold: vehicle edges per passenger plus a
// private fallback column. `shift_cardinality` realizes the hard assignment
// constraint (dummy at -inf): any extra vehicle assignment dominates utility.
BatchMatchResult run_bipartite(Strategy strategy, const WorldSnapshot& snap,
                               const UtilityContext& ctx) {
    const bool use_partial = strategy != Strategy::np;
    const bool shift_cardinality =
        strategy == Strategy::np || strategy == Strategy::mb || strategy == Strategy::fl_no_delay;
    const bool wait_option = strategy == Strategy::fl || strategy == Strategy::fl_naive;

    std::vector<std::vector<VehicleCandidate>> cands(snap.waiting.size());
    std::vector<std::vector<double>> raw(snap.waiting.size());
    double abs_sum = 1.0;
    for (std::size_t i = 0; i < snap.waiting.size(); ++i) {
        const Order& order = *snap.waiting[i];
        auto all = feasible_pairs(order, snap.vehicles, *ctx.net, ctx.cfg);
        for (auto& c : all) {
            if (c.partial && !use_partial) continue;
            double u = 0.0;
            switch (strategy) {
            case Strategy::np:
            case Strategy::mb: u = utility_myopic(order, c, ctx); break;
            case Strategy::fl: u = utility_fl_vehicle(order, c, ctx); break;
            case Strategy::fl_no_delay: u = utility_fl_no_delay(order, c, ctx); break;
            case Strategy::fl_naive: u = utility_naive_vehicle(order, c, ctx); break;
            case Strategy::rtv: break; // handled elsewhere
            }
            cands[i].push_back(c);
            raw[i].push_back(u);
            abs_sum += std::fabs(u);
        }
    }
    const double shift = shift_cardinality ? abs_sum : 0.0;

    AssignProblem problem;
    problem.rows.resize(snap.waiting.size());
    std::vector<std::vector<double>> row_raw(snap.waiting.size());
    for (std::size_t i = 0; i < snap.waiting.size(); ++i) {
        const Order& order = *snap.waiting[i];
        for (std::size_t c = 0; c < cands[i].size(); ++c) {
            problem.rows[i].push_back({cands[i][c].vehicle_id, raw[i][c] + shift});
            row_raw[i].push_back(raw[i][c]);
        }
        if (wait_option && order.rounds_waited < rounds_budget(order, ctx.cfg)) {
            double u = strategy == Strategy::fl ? utility_fl_wait(order, ctx)
                                                : utility_naive_wait(order, ctx);
            problem.rows[i].push_back({kWaitOption, u});
            row_raw[i].push_back(u);
        } else {
            problem.rows[i].push_back({kSinkOption, 0.0});
            row_raw[i].push_back(0.0);
        }
    }

    AssignResult solved = solve_max_weight_assignment(problem);

    BatchMatchResult result;
    result.round = snap.round;
    for (std::size_t i = 0; i < snap.waiting.size(); ++i) {
        AssignmentDecision d;
        d.order_id = snap.waiting[i]->id;
        int choice = solved.choice[i];
        const auto& opt = problem.rows[i][choice];
        if (opt.option_id >= 0) {
            const VehicleCandidate& c = cands[i][choice];
            d.vehicle_id = c.vehicle_id;
            d.pool_with_onboard = c.partial;
            d.mode = c.geometry.mode;
            d.saving_m = c.partial ? c.geometry.saving_m : 0.0;
            d.pickup_m = c.pickup_m;
            d.utility = row_raw[i][choice];
            result.objective += d.utility;
        } else {
            d.vehicle_id = -1;
            d.utility = opt.option_id == kWaitOption ? row_raw[i][choice] : 0.0;
            if (opt.option_id == kWaitOption) result.objective += d.utility;
        }
        result.assignments.push_back(d);
    }
    return result;
}

// ---- RTV (capacity 2): requests -> trips -> vehicles, exact solve ----

struct TripEdge {
    int kind = 0; // 0: singleton+vacant, 1: singleton+partial, 2: pair+vacant
    int request = -1;
    int partner = -1; // pair only (partner > request)
    int vehicle = -1; // index into snap.vehicles
    double value = 0.0;
    double weight = 0.0; // cardinality-shifted
    const VehicleCandidate* cand = nullptr; // singleton geometry (kind 1)
    PairTripGeometry pair;                  // kind 2
};

struct Component {
    std::vector<int> requests;       // indices into waiting
    std::vector<int> vehicles;       // indices into snap.vehicles
};

class RtvSolver {
public:
    RtvSolver(const WorldSnapshot& snap, const UtilityContext& ctx) : snap_(snap), ctx_(ctx) {}

    BatchMatchResult solve() {
        build_edges();
        BatchMatchResult result;
        result.round = snap_.round;
        std::vector<char> request_served(snap_.waiting.size(), 0);

        for (const Component& comp : components()) solve_component(comp);

        for (const TripEdge* e : chosen_) {
            if (e->kind == 2) {
                const Order& a = *snap_.waiting[e->request];
                const Order& b = *snap_.waiting[e->partner];
                const Order& first = e->pair.first == 0 ? a : b;
                const Order& second = e->pair.first == 0 ? b : a;
                PairTripDecision p;
                p.first_order = first.id;
                p.second_order = second.id;
                p.vehicle_id = snap_.vehicles[e->vehicle].id;
                p.mode = e->pair.mode;
                p.saving_m = e->pair.saving_m;
                NodeId vnode = snap_.vehicles[e->vehicle].node;
                p.pickup_first_m = ctx_.net->shortest_distance(vnode, first.od.origin);
                p.pickup_second_m = ctx_.net->shortest_distance(vnode, second.od.origin);
                result.pair_trips.push_back(p);
                request_served[e->request] = 1;
                request_served[e->partner] = 1;
                result.objective += e->value;
            } else {
                AssignmentDecision d;
                d.order_id = snap_.waiting[e->request]->id;
                d.vehicle_id = snap_.vehicles[e->vehicle].id;
                d.pool_with_onboard = e->kind == 1;
                if (e->cand) {
                    d.mode = e->cand->geometry.mode;
                    d.saving_m = e->kind == 1 ? e->cand->geometry.saving_m : 0.0;
                    d.pickup_m = e->cand->pickup_m;
                }
                d.utility = e->value;
                result.assignments.push_back(d);
                request_served[e->request] = 1;
                result.objective += e->value;
            }
        }
        for (std::size_t i = 0; i < snap_.waiting.size(); ++i) {
            if (request_served[i]) continue;
            AssignmentDecision d;
            d.order_id = snap_.waiting[i]->id;
            d.vehicle_id = -1;
            result.assignments.push_back(d);
        }
        std::sort(result.assignments.begin(), result.assignments.end(),
                  [](const auto& a, const auto& b) { return a.order_id < b.order_id; });
        return result;
    }

private:
    void build_edges() {
        const auto& waiting = snap_.waiting;
        cand_store_.resize(waiting.size());
        double abs_sum = 1.0;
        for (std::size_t i = 0; i < waiting.size(); ++i) {
            cand_store_[i] = feasible_pairs(*waiting[i], snap_.vehicles, *ctx_.net, ctx_.cfg);
            for (const auto& c : cand_store_[i]) abs_sum += std::fabs(c.geometry.saving_m);
        }
        // pairwise shareability among waiting requests
        pair_geom_.assign(waiting.size() * waiting.size(), {});
        for (std::size_t i = 0; i < waiting.size(); ++i) {
            for (std::size_t j = i + 1; j < waiting.size(); ++j) {
                PairTripGeometry g =
                    pair_trip_geometry(*ctx_.net, waiting[i]->od, waiting[j]->od, ctx_.cfg);
                pair_geom_[i * waiting.size() + j] = g;
                if (g.feasible) abs_sum += std::fabs(g.saving_m);
            }
        }
        shift_ = abs_sum;

        for (std::size_t i = 0; i < waiting.size(); ++i) {
            for (const auto& c : cand_store_[i]) {
                TripEdge e;
                e.request = static_cast<int>(i);
                e.vehicle = local_vehicle(c.vehicle_id);
                e.cand = &c;
                if (c.partial) {
                    e.kind = 1;
                    e.value = c.geometry.saving_m;
                } else {
                    e.kind = 0;
                    e.value = 0.0;
                }
                e.weight = e.value + shift_;
                edges_.push_back(e);
            }
        }
        for (std::size_t i = 0; i < waiting.size(); ++i) {
            for (std::size_t j = i + 1; j < waiting.size(); ++j) {
                const PairTripGeometry& g = pair_geom_[i * waiting.size() + j];
                if (!g.feasible) continue;
                for (std::size_t v = 0; v < snap_.vehicles.size(); ++v) {
                    const VehicleView& view = snap_.vehicles[v];
                    if (!view.vacant()) continue;
                    if (!ctx_.net->reachable(view.node, waiting[i]->od.origin) ||
                        !ctx_.net->reachable(view.node, waiting[j]->od.origin))
                        continue;
                    if (!(ctx_.net->shortest_distance(view.node, waiting[i]->od.origin) <
                          ctx_.cfg.max_pickup_m))
                        continue;
                    if (!(ctx_.net->shortest_distance(view.node, waiting[j]->od.origin) <
                          ctx_.cfg.max_pickup_m))
                        continue;
                    TripEdge e;
                    e.kind = 2;
                    e.request = static_cast<int>(i);
                    e.partner = static_cast<int>(j);
                    e.vehicle = static_cast<int>(v);
                    e.value = g.saving_m;
                    e.pair = g;
                    e.weight = e.value + 2.0 * shift_;
                    edges_.push_back(e);
                }
            }
        }
        edges_by_request_.assign(waiting.size(), {});
        for (std::size_t k = 0; k < edges_.size(); ++k)
            edges_by_request_[edges_[k].request].push_back(static_cast<int>(k));

        // optimistic per-request weight share (pair edges count half per rider)
        ub_.assign(waiting.size(), 0.0);
        for (const TripEdge& e : edges_) {
            double share = e.kind == 2 ? e.weight / 2.0 : e.weight;
            ub_[e.request] = std::max(ub_[e.request], share);
            if (e.kind == 2) ub_[e.partner] = std::max(ub_[e.partner], share);
        }
    }

    int local_vehicle(int vehicle_id) const {
        auto it = std::lower_bound(snap_.vehicles.begin(), snap_.vehicles.end(), vehicle_id,
                                   [](const VehicleView& v, int id) { return v.id < id; });
        if (it == snap_.vehicles.end() || it->id != vehicle_id)
            throw std::logic_error("unknown vehicle id in candidate");
        return static_cast<int>(it - snap_.vehicles.begin());
    }

    std::vector<Component> components() {
        const int nr = static_cast<int>(snap_.waiting.size());
        const int nv = static_cast<int>(snap_.vehicles.size());
        parent_.resize(nr + nv);
        std::iota(parent_.begin(), parent_.end(), 0);
        for (const TripEdge& e : edges_) {
            unite(e.request, nr + e.vehicle);
            if (e.kind == 2) unite(e.partner, nr + e.vehicle);
        }
        std::vector<Component> comps;
        std::vector<int> comp_of(nr + nv, -1);
        for (int r = 0; r < nr; ++r) {
            int root = find(r);
            if (comp_of[root] == -1) {
                comp_of[root] = static_cast<int>(comps.size());
                comps.emplace_back();
            }
            comps[comp_of[root]].requests.push_back(r);
        }
        for (int v = 0; v < nv; ++v) {
            int root = find(nr + v);
            if (comp_of[root] >= 0) comps[comp_of[root]].vehicles.push_back(v);
        }
        return comps;
    }

    int find(int x) { return parent_[x] == x ? x : parent_[x] = find(parent_[x]); }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

    void solve_component(const Component& comp) {
        // branch and bound over the component's requests in id order
        const auto& reqs = comp.requests;
        if (reqs.empty()) return;
        std::vector<double> suffix(reqs.size() + 1, 0.0);
        for (int i = static_cast<int>(reqs.size()) - 1; i >= 0; --i)
            suffix[i] = suffix[i + 1] + ub_[reqs[i]];

        // candidate edges per request within this component, best weight first
        std::vector<std::vector<int>> options(snap_.waiting.size());
        for (int r : reqs) {
            options[r] = edges_by_request_[r];
            std::sort(options[r].begin(), options[r].end(), [this](int a, int b) {
                if (edges_[a].weight != edges_[b].weight)
                    return edges_[a].weight > edges_[b].weight;
                if (edges_[a].kind != edges_[b].kind) return edges_[a].kind < edges_[b].kind;
                if (edges_[a].vehicle != edges_[b].vehicle)
                    return edges_[a].vehicle < edges_[b].vehicle;
                return edges_[a].partner < edges_[b].partner;
            });
        }

        best_value_ = -1.0;
        best_pick_.clear();
        pick_.clear();
        used_vehicle_.assign(snap_.vehicles.size(), 0);
        used_request_.assign(snap_.waiting.size(), 0);
        branch(reqs, 0, 0.0, suffix, options);
        for (int k : best_pick_) chosen_.push_back(&edges_[k]);
    }

    void branch(const std::vector<int>& reqs, std::size_t depth, double value,
                const std::vector<double>& suffix,
                const std::vector<std::vector<int>>& options) {
        if (depth == reqs.size()) {
            if (value > best_value_) {
                best_value_ = value;
                best_pick_ = pick_;
            }
            return;
        }
        if (value + suffix[depth] <= best_value_) return;
        int r = reqs[depth];
        if (used_request_[r]) {
            branch(reqs, depth + 1, value, suffix, options);
            return;
        }
        for (int k : options[r]) {
            const TripEdge& e = edges_[k];
            if (used_vehicle_[e.vehicle]) continue;
            if (e.kind == 2 && used_request_[e.partner]) continue;
            used_vehicle_[e.vehicle] = 1;
            used_request_[r] = 1;
            if (e.kind == 2) used_request_[e.partner] = 1;
            pick_.push_back(k);
            branch(reqs, depth + 1, value + e.weight, suffix, options);
            pick_.pop_back();
            used_vehicle_[e.vehicle] = 0;
            used_request_[r] = 0;
            if (e.kind == 2) used_request_[e.partner] = 0;
        }
        branch(reqs, depth + 1, value, suffix, options); // leave r unserved
    }

    const WorldSnapshot& snap_;
    const UtilityContext& ctx_;
    std::vector<std::vector<VehicleCandidate>> cand_store_;
    std::vector<PairTripGeometry> pair_geom_;
    std::vector<TripEdge> edges_;
    std::vector<std::vector<int>> edges_by_request_;
    std::vector<double> ub_;
    std::vector<int> parent_;
    double shift_ = 0.0;

    double best_value_ = -1.0;
    std::vector<int> best_pick_, pick_;
    std::vector<char> used_vehicle_, used_request_;
    std::vector<const TripEdge*> chosen_;
};

} // namespace

BatchMatchResult dispatch_round(Strategy strategy, const WorldSnapshot& snap,
                                const UtilityContext& ctx) {
    if (!ctx.net) throw std::invalid_argument("dispatch_round needs a network");
    if ((strategy == Strategy::fl || strategy == Strategy::fl_no_delay ||
         strategy == Strategy::fl_naive) &&
        (!ctx.tables || !ctx.space))
        throw std::invalid_argument(
            "forward-looking strategies need prediction tables (run predict first)");
    for (const VehicleView& v : snap.vehicles)
        if (v.full()) throw std::logic_error("full vehicle in candidate snapshot");

    BatchMatchResult result;
    if (strategy == Strategy::rtv) {
        RtvSolver solver(snap, ctx);
        result = solver.solve();
    } else {
        result = run_bipartite(strategy, snap, ctx);
    }

    // Eq.-2/Eq.-3 feasibility: every waiting passenger decided once, every
    // vehicle used at most once.
    if (result.assignments.size() != snap.waiting.size())
        throw std::logic_error("batch result does not cover all passengers");
    std::vector<int> used;
    for (const auto& a : result.assignments)
        if (a.vehicle_id >= 0) used.push_back(a.vehicle_id);
    for (const auto& p : result.pair_trips) used.push_back(p.vehicle_id);
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
        throw std::logic_error("vehicle assigned twice in one round");
    return result;
}

} // namespace ridepool
