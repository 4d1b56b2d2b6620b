#pragma once

#include <vector>

namespace ridepool {

// Option ids >= 0 denote shared columns (vehicles): at most one row may take a
// given id. Negative ids are private to their row (WAIT, unassigned sink).
inline constexpr int kWaitOption = -1;
inline constexpr int kSinkOption = -2;

struct AssignOption {
    int option_id = kSinkOption;
    double weight = 0.0;
};

struct AssignProblem {
    // one entry per passenger row; every row needs at least one option
    std::vector<std::vector<AssignOption>> rows;
};

struct AssignResult {
    std::vector<int> choice; // index into rows[i].options
    double total_weight = 0.0;
};

// Exact maximum-weight assignment: each row picks exactly one of its options,
// each shared option id is used at most once. Shortest-augmenting-path method
// with potentials; deterministic, and equal-weight ties resolve toward smaller
// column ids by scan order.
AssignResult solve_max_weight_assignment(const AssignProblem& problem);

} // namespace ridepool
