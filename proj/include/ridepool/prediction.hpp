#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ridepool/domain.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

/// A passenger aboard a partially occupied vehicle, traversing link `link`
/// (position-th link of its OD's path). The state is occupied for one link
/// traversal: tau_s = link length / speed.
struct TakerState {
    int od = -1;
    int position = 0;
    LinkId link = -1;
    double tau_s = 0.0;
};

/// Seeker/taker states for a set of OD pairs plus their matching relations.
/// Takers are id-ordered by (od index, path position); seekers share the OD
/// index. All adjacency lists are sorted, so iteration is deterministic.
struct StateSpace {
    std::vector<ODPair> ods;
    std::vector<TakerState> takers;
    std::vector<std::vector<int>> takers_of_od; // T_w: taker ids along A_w, in path order

    std::vector<std::vector<int>> seeker_matches;   // T_{s(w)}: taker ids, ascending
    std::vector<std::vector<double>> seeker_E;      // E(s(w), t), aligned to seeker_matches
    std::vector<std::vector<int>> taker_matches;    // S_t: od indices, ascending
    std::vector<std::vector<double>> taker_E;       // E(s, t), aligned to taker_matches

    // T_{s(w)} sorted by matching quality: E descending, taker id ascending.
    // The priority set T_{s(w)}^{>t} is the strict prefix before t.
    std::vector<std::vector<int>> seeker_priority;
    // slot of od w in taker_matches[t] for each (w, t) in seeker_priority
    std::vector<std::vector<int>> priority_slot;

    int find_od(NodeId origin, NodeId destination) const;
};

StateSpace build_state_space(const RoadNetwork& net, std::vector<ODPair> ods,
                             const PairingConfig& cfg);

struct FixedPointOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    double damping = 0.5;
};

struct PredictionTables {
    // seeker side, by OD index
    std::vector<double> lambda_od; // arrivals per second
    std::vector<double> p_seeker;
    std::vector<double> e_seeker_m;
    std::vector<double> e_vacant_m;
    std::vector<std::uint8_t> vacant_degenerate;

    // taker side, by taker id
    std::vector<double> lambda_taker;
    std::vector<double> eta_total;
    std::vector<double> p_taker;
    std::vector<double> rho;
    std::vector<double> tau_s;
    std::vector<double> e_taker_m;
    std::vector<std::vector<double>> eta; // aligned to space.taker_matches

    int iterations = 0;
    double residual = 0.0;
    long clip_events = 0;
    std::vector<double> residual_history;
};

struct FixedPointError : std::runtime_error {
    FixedPointError(double best, int iters)
        : std::runtime_error("fixed point did not converge after " + std::to_string(iters) +
                             " iterations (best residual " + std::to_string(best) + ")"),
          best_residual(best) {}
    double best_residual;
};

/// Solves the seeker/taker system by damped fixed-point iteration. Sweep order
/// within an iteration: rho, eta^s, eta, p_t, p_s, lambda_t; each family is
/// updated Jacobi-style from the tables as of its turn and damped by
/// x <- (1-beta) x + beta F(x). Converged when the max-abs self-consistency
/// residual over all families is <= tol.
PredictionTables solve_fixed_point(const StateSpace& space, const std::vector<double>& lambda_od,
                                   const FixedPointOptions& opt = {});

// Eq.-level re-evaluations from solved tables (also stored in the tables).
double expected_saving_taker(const StateSpace&, const PredictionTables&, int taker);
double expected_saving_vacant(const StateSpace&, const PredictionTables&, int od,
                              bool* degenerate = nullptr);
double expected_saving_seeker(const StateSpace&, const PredictionTables&, int od);

// Expected saving of keeping a waiting passenger at the origin for the rest of
// its budget: [1-(1-r_w)^(k_budget-k_waited)] [p_s e_seeker + (1-p_s) e_vacant].
// Throws std::invalid_argument when k_waited > k_budget.
double expected_saving_wait(const PredictionTables&, int od, int k_waited, double r_w,
                            int k_budget);

void save_tables(const StateSpace& space, const PredictionTables& tables,
                 const std::string& path);

/// Self-contained view of a tables file; ODs are identified by node pairs.
struct LoadedTables {
    std::vector<std::pair<NodeId, NodeId>> ods;
    std::vector<TakerState> takers;            // link/od meta as saved
    std::vector<std::vector<int>> taker_matches;
    std::vector<std::vector<int>> seeker_matches;
    std::vector<std::vector<double>> seeker_E;
    PredictionTables tables;

    int find_od(NodeId origin, NodeId destination) const;
};

LoadedTables load_tables(const std::string& path);

} // namespace ridepool
