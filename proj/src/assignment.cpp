#include "ridepool/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ridepool {

AssignResult solve_max_weight_assignment(const AssignProblem& problem) {
    const int n = static_cast<int>(problem.rows.size());
    AssignResult result;
    result.choice.assign(n, -1);
    if (n == 0) return result;

    // Column layout: shared option ids (ascending), then one private column per
    // private option. Columns are 1-based inside the solver.
    std::map<int, int> shared_col; // option id -> column (1-based)
    for (const auto& row : problem.rows) {
        if (row.empty()) throw std::invalid_argument("assignment row without options");
        for (const auto& opt : row)
            if (opt.option_id >= 0) shared_col.emplace(opt.option_id, 0);
    }
    int next_col = 1;
    for (auto& [id, col] : shared_col) col = next_col++;

    double weight_scale = 1.0;
    for (const auto& row : problem.rows)
        for (const auto& opt : row) weight_scale += std::fabs(opt.weight);
    const double absent = 2.0 * weight_scale; // cost strictly above any real completion

    // cost[i][j] = -weight, minimized
    std::vector<std::vector<std::pair<int, int>>> row_cols(n); // (column, option index)
    int m = next_col - 1;
    for (int i = 0; i < n; ++i) {
        for (std::size_t oi = 0; oi < problem.rows[i].size(); ++oi) {
            const auto& opt = problem.rows[i][oi];
            int col = opt.option_id >= 0 ? shared_col[opt.option_id] : ++m;
            row_cols[i].push_back({col, static_cast<int>(oi)});
        }
    }

    if (m < n) throw std::invalid_argument("assignment problem has fewer columns than rows");

    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(m + 1, absent));
    std::vector<std::vector<int>> optidx(n + 1, std::vector<int>(m + 1, -1));
    for (int i = 0; i < n; ++i) {
        for (auto [col, oi] : row_cols[i]) {
            double c = -problem.rows[i][static_cast<std::size_t>(oi)].weight;
            if (c < cost[i + 1][col]) {
                cost[i + 1][col] = c;
                optidx[i + 1][col] = oi;
            }
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 1; j <= m; ++j) {
        int i = p[j];
        if (i == 0) continue;
        if (optidx[i][j] < 0) throw std::logic_error("assignment used an absent edge");
        result.choice[i - 1] = optidx[i][j];
        result.total_weight += problem.rows[i - 1][optidx[i][j]].weight;
    }
    for (int i = 0; i < n; ++i)
        if (result.choice[i] < 0) throw std::logic_error("assignment left a row unassigned");
    return result;
}

} // namespace ridepool
