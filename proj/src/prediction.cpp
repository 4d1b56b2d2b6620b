#include "ridepool/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ridepool/csv.hpp"

namespace ridepool {

int StateSpace::find_od(NodeId origin, NodeId destination) const {
    for (std::size_t i = 0; i < ods.size(); ++i)
        if (ods[i].origin == origin && ods[i].destination == destination)
            return static_cast<int>(i);
    return -1;
}

int LoadedTables::find_od(NodeId origin, NodeId destination) const {
    for (std::size_t i = 0; i < ods.size(); ++i)
        if (ods[i].first == origin && ods[i].second == destination) return static_cast<int>(i);
    return -1;
}

StateSpace build_state_space(const RoadNetwork& net, std::vector<ODPair> ods,
                             const PairingConfig& cfg) {
    StateSpace s;
    s.ods = std::move(ods);
    const int nod = static_cast<int>(s.ods.size());
    s.takers_of_od.resize(nod);
    for (int w = 0; w < nod; ++w) {
        int pos = 0;
        for (LinkId lid : s.ods[w].path) {
            s.takers_of_od[w].push_back(static_cast<int>(s.takers.size()));
            s.takers.push_back({w, pos++, lid, net.link(lid).length_m / net.speed_mps()});
        }
    }
    const int nt = static_cast<int>(s.takers.size());
    s.seeker_matches.resize(nod);
    s.seeker_E.resize(nod);
    s.taker_matches.resize(nt);
    s.taker_E.resize(nt);

    // A taker on link a is matchable with a seeker of OD w' when the pairing
    // conditions hold with the vehicle taken at the link's head node.
    for (int t = 0; t < nt; ++t) {
        const TakerState& tk = s.takers[t];
        const NodeId head = net.link(tk.link).head;
        for (int w = 0; w < nod; ++w) {
            if (!net.reachable(head, s.ods[w].origin)) continue;
            double pk = net.shortest_distance(head, s.ods[w].origin);
            if (!(pk < cfg.max_pickup_m)) continue;
            PairGeometry g =
                best_pair_geometry(net, s.ods[tk.od], s.ods[w], head, cfg.max_detour_m);
            if (!g.feasible) continue;
            s.taker_matches[t].push_back(w);
            s.taker_E[t].push_back(g.saving_m);
            s.seeker_matches[w].push_back(t);
            s.seeker_E[w].push_back(g.saving_m);
        }
    }

    // priority order: E descending, taker id ascending (strict total order)
    s.seeker_priority.resize(nod);
    s.priority_slot.resize(nod);
    for (int w = 0; w < nod; ++w) {
        const auto& match = s.seeker_matches[w];
        const auto& evals = s.seeker_E[w];
        std::vector<int> idx(match.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (evals[a] != evals[b]) return evals[a] > evals[b];
            return match[a] < match[b];
        });
        for (int i : idx) {
            int t = match[i];
            s.seeker_priority[w].push_back(t);
            auto it = std::lower_bound(s.taker_matches[t].begin(), s.taker_matches[t].end(), w);
            s.priority_slot[w].push_back(
                static_cast<int>(it - s.taker_matches[t].begin()));
        }
    }
    return s;
}

namespace {

double rho_equation(double lambda_t, double eta, double tau, long* clips) {
    double raw;
    if (eta > 0.0)
        raw = lambda_t * (1.0 - std::exp(-eta * tau)) / eta;
    else
        raw = lambda_t * tau;
    if (raw > 1.0) {
        if (clips) ++(*clips);
        return 1.0;
    }
    return raw;
}

struct Families {
    std::vector<double> rho, p_t, p_s, lambda_t, eta_total;
    std::vector<std::vector<double>> eta;
};

// One full evaluation of the six equation families at the given table state.
Families evaluate(const StateSpace& s, const std::vector<double>& lambda_od, const Families& x,
                  long* clips) {
    const int nod = static_cast<int>(s.ods.size());
    const int nt = static_cast<int>(s.takers.size());
    Families f;
    f.rho.resize(nt);
    for (int t = 0; t < nt; ++t)
        f.rho[t] = rho_equation(x.lambda_t[t], x.eta_total[t], s.takers[t].tau_s, clips);

    f.eta.assign(nt, {});
    for (int t = 0; t < nt; ++t) f.eta[t].assign(s.taker_matches[t].size(), 0.0);
    for (int w = 0; w < nod; ++w) {
        double prod = 1.0;
        for (std::size_t i = 0; i < s.seeker_priority[w].size(); ++i) {
            int t = s.seeker_priority[w][i];
            f.eta[t][s.priority_slot[w][i]] = lambda_od[w] * prod;
            prod *= 1.0 - x.rho[t];
        }
    }
    f.eta_total.resize(nt);
    for (int t = 0; t < nt; ++t) {
        double sum = 0.0;
        for (double v : f.eta[t]) sum += v;
        f.eta_total[t] = sum;
    }

    f.p_t.resize(nt);
    for (int t = 0; t < nt; ++t)
        f.p_t[t] = x.eta_total[t] > 0.0
                       ? 1.0 - std::exp(-x.eta_total[t] * s.takers[t].tau_s)
                       : 0.0;

    f.p_s.resize(nod);
    for (int w = 0; w < nod; ++w) {
        if (s.seeker_matches[w].empty()) {
            f.p_s[w] = 0.0;
        } else {
            double prod = 1.0;
            for (int t : s.seeker_matches[w]) prod *= 1.0 - x.rho[t];
            f.p_s[w] = 1.0 - prod;
        }
    }

    f.lambda_t.resize(nt);
    for (int w = 0; w < nod; ++w) {
        const auto& row = s.takers_of_od[w];
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (n == 0)
                f.lambda_t[row[n]] = lambda_od[w] * (1.0 - x.p_s[w]);
            else
                f.lambda_t[row[n]] = x.lambda_t[row[n - 1]] * (1.0 - x.p_t[row[n - 1]]);
        }
    }
    return f;
}

double residual_of(const StateSpace& s, const std::vector<double>& lambda_od, const Families& x) {
    Families f = evaluate(s, lambda_od, x, nullptr);
    double r = 0.0;
    const int nt = static_cast<int>(s.takers.size());
    const int nod = static_cast<int>(s.ods.size());
    for (int t = 0; t < nt; ++t) {
        r = std::max(r, std::fabs(x.rho[t] - f.rho[t]));
        r = std::max(r, std::fabs(x.p_t[t] - f.p_t[t]));
        r = std::max(r, std::fabs(x.lambda_t[t] - f.lambda_t[t]));
        r = std::max(r, std::fabs(x.eta_total[t] - f.eta_total[t]));
        for (std::size_t i = 0; i < x.eta[t].size(); ++i)
            r = std::max(r, std::fabs(x.eta[t][i] - f.eta[t][i]));
    }
    for (int w = 0; w < nod; ++w) r = std::max(r, std::fabs(x.p_s[w] - f.p_s[w]));
    return r;
}

} // namespace

PredictionTables solve_fixed_point(const StateSpace& s, const std::vector<double>& lambda_od,
                                   const FixedPointOptions& opt) {
    if (lambda_od.size() != s.ods.size())
        throw std::invalid_argument("lambda_od size does not match state space");
    for (double l : lambda_od)
        if (l < 0.0) throw std::invalid_argument("negative arrival rate");
    const int nod = static_cast<int>(s.ods.size());
    const int nt = static_cast<int>(s.takers.size());
    const double beta = opt.damping;

    PredictionTables out;
    out.lambda_od = lambda_od;
    out.tau_s.resize(nt);
    for (int t = 0; t < nt; ++t) out.tau_s[t] = s.takers[t].tau_s;

    // Initialization: probabilities zero, lambda cascade at p = 0, eta from the
    // no-competition branch. This is the exact fixed point when demand is zero.
    Families x;
    x.rho.assign(nt, 0.0);
    x.p_t.assign(nt, 0.0);
    x.p_s.assign(nod, 0.0);
    x.lambda_t.resize(nt);
    for (int w = 0; w < nod; ++w)
        for (int t : s.takers_of_od[w]) x.lambda_t[t] = lambda_od[w];
    x.eta.assign(nt, {});
    for (int t = 0; t < nt; ++t) x.eta[t].assign(s.taker_matches[t].size(), 0.0);
    for (int w = 0; w < nod; ++w)
        for (std::size_t i = 0; i < s.seeker_priority[w].size(); ++i)
            x.eta[s.seeker_priority[w][i]][s.priority_slot[w][i]] = lambda_od[w];
    x.eta_total.assign(nt, 0.0);
    for (int t = 0; t < nt; ++t)
        for (double v : x.eta[t]) x.eta_total[t] += v;

    auto damp = [beta](double old_v, double new_v) { return (1.0 - beta) * old_v + beta * new_v; };

    double best_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        // staged sweep: each family sees the families updated before it
        for (int t = 0; t < nt; ++t)
            x.rho[t] = damp(x.rho[t],
                            rho_equation(x.lambda_t[t], x.eta_total[t], s.takers[t].tau_s,
                                         &out.clip_events));
        for (int w = 0; w < nod; ++w) {
            double prod = 1.0;
            for (std::size_t i = 0; i < s.seeker_priority[w].size(); ++i) {
                int t = s.seeker_priority[w][i];
                int slot = s.priority_slot[w][i];
                x.eta[t][slot] = damp(x.eta[t][slot], lambda_od[w] * prod);
                prod *= 1.0 - x.rho[t];
            }
        }
        for (int t = 0; t < nt; ++t) {
            double sum = 0.0;
            for (double v : x.eta[t]) sum += v;
            x.eta_total[t] = sum;
        }
        for (int t = 0; t < nt; ++t) {
            double raw = x.eta_total[t] > 0.0
                             ? 1.0 - std::exp(-x.eta_total[t] * s.takers[t].tau_s)
                             : 0.0;
            x.p_t[t] = damp(x.p_t[t], raw);
        }
        for (int w = 0; w < nod; ++w) {
            double raw;
            if (s.seeker_matches[w].empty()) {
                raw = 0.0;
            } else {
                double prod = 1.0;
                for (int t : s.seeker_matches[w]) prod *= 1.0 - x.rho[t];
                raw = 1.0 - prod;
            }
            x.p_s[w] = damp(x.p_s[w], raw);
        }
        for (int w = 0; w < nod; ++w) {
            const auto& row = s.takers_of_od[w];
            std::vector<double> prev(row.size());
            for (std::size_t n = 0; n < row.size(); ++n) prev[n] = x.lambda_t[row[n]];
            for (std::size_t n = 0; n < row.size(); ++n) {
                double raw = n == 0 ? lambda_od[w] * (1.0 - x.p_s[w])
                                    : prev[n - 1] * (1.0 - x.p_t[row[n - 1]]);
                x.lambda_t[row[n]] = damp(prev[n], raw);
            }
        }

        double r = residual_of(s, lambda_od, x);
        out.residual_history.push_back(r);
        best_residual = std::min(best_residual, r);
        if (r <= opt.tol) {
            out.iterations = iter;
            out.residual = r;
            converged = true;
            break;
        }
    }
    if (!converged) throw FixedPointError(best_residual, opt.max_iter);

    out.rho = x.rho;
    out.p_taker = x.p_t;
    out.p_seeker = x.p_s;
    out.lambda_taker = x.lambda_t;
    out.eta_total = x.eta_total;
    out.eta = x.eta;

    out.e_taker_m.resize(nt);
    for (int t = 0; t < nt; ++t) out.e_taker_m[t] = expected_saving_taker(s, out, t);
    out.e_seeker_m.resize(nod);
    out.e_vacant_m.resize(nod);
    out.vacant_degenerate.resize(nod);
    for (int w = 0; w < nod; ++w) {
        out.e_seeker_m[w] = expected_saving_seeker(s, out, w);
        bool degen = false;
        out.e_vacant_m[w] = expected_saving_vacant(s, out, w, &degen);
        out.vacant_degenerate[w] = degen ? 1 : 0;
    }
    return out;
}

double expected_saving_taker(const StateSpace& s, const PredictionTables& tb, int taker) {
    const auto& etas = tb.eta[taker];
    const auto& evals = s.taker_E[taker];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        num += etas[i] * evals[i];
        den += etas[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

double expected_saving_vacant(const StateSpace& s, const PredictionTables& tb, int od,
                              bool* degenerate) {
    if (degenerate) *degenerate = false;
    const double lam = tb.lambda_od[od];
    const double ps = tb.p_seeker[od];
    if (lam == 0.0 || ps >= 1.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    double sum = 0.0;
    for (int t : s.takers_of_od[od])
        sum += tb.e_taker_m[t] * tb.p_taker[t] * tb.lambda_taker[t];
    return sum / ((1.0 - ps) * lam);
}

double expected_saving_seeker(const StateSpace& s, const PredictionTables& tb, int od) {
    const auto& match = s.seeker_matches[od];
    const auto& evals = s.seeker_E[od];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < match.size(); ++i) {
        int t = match[i];
        auto it = std::lower_bound(s.taker_matches[t].begin(), s.taker_matches[t].end(), od);
        int slot = static_cast<int>(it - s.taker_matches[t].begin());
        double wgt = tb.rho[t] * tb.eta[t][slot];
        num += evals[i] * wgt;
        den += wgt;
    }
    return den > 0.0 ? num / den : 0.0;
}

double expected_saving_wait(const PredictionTables& tb, int od, int k_waited, double r_w,
                            int k_budget) {
    if (k_waited > k_budget)
        throw std::invalid_argument("passenger waited past its rounds budget");
    double window = 1.0 - std::pow(1.0 - r_w, k_budget - k_waited);
    double value = tb.p_seeker[od] * tb.e_seeker_m[od] +
                   (1.0 - tb.p_seeker[od]) * tb.e_vacant_m[od];
    return window * value;
}

namespace {

void write_section(std::ofstream& f, const char* name) { f << '[' << name << "]\n"; }

} // namespace

void save_tables(const StateSpace& s, const PredictionTables& tb, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f << "# ridepool prediction tables\n";
    write_section(f, "seekers");
    f << "od,origin,destination,lambda_per_s,p_seeker,e_seeker_m,e_vacant_m,degenerate\n";
    for (std::size_t w = 0; w < s.ods.size(); ++w) {
        f << w << ',' << s.ods[w].origin << ',' << s.ods[w].destination << ','
          << format_double(tb.lambda_od[w]) << ',' << format_double(tb.p_seeker[w]) << ','
          << format_double(tb.e_seeker_m[w]) << ',' << format_double(tb.e_vacant_m[w]) << ','
          << int(tb.vacant_degenerate[w]) << '\n';
    }
    write_section(f, "takers");
    f << "taker,od,position,link,tau_s,lambda_taker,eta_total,p_taker,rho,e_taker_m\n";
    for (std::size_t t = 0; t < s.takers.size(); ++t) {
        const TakerState& tk = s.takers[t];
        f << t << ',' << tk.od << ',' << tk.position << ',' << tk.link << ','
          << format_double(tb.tau_s[t]) << ',' << format_double(tb.lambda_taker[t]) << ','
          << format_double(tb.eta_total[t]) << ',' << format_double(tb.p_taker[t]) << ','
          << format_double(tb.rho[t]) << ',' << format_double(tb.e_taker_m[t]) << '\n';
    }
    write_section(f, "eta");
    f << "taker,seeker_od,eta_per_s\n";
    for (std::size_t t = 0; t < s.takers.size(); ++t)
        for (std::size_t i = 0; i < s.taker_matches[t].size(); ++i)
            f << t << ',' << s.taker_matches[t][i] << ',' << format_double(tb.eta[t][i]) << '\n';
    write_section(f, "E");
    f << "seeker_od,taker,E_m\n";
    for (std::size_t w = 0; w < s.ods.size(); ++w)
        for (std::size_t i = 0; i < s.seeker_matches[w].size(); ++i)
            f << w << ',' << s.seeker_matches[w][i] << ',' << format_double(s.seeker_E[w][i])
              << '\n';
}

namespace {

// Reads one section: "[name]" then a header row, then data rows until the next
// section or EOF. Returns data rows as split fields.
struct SectionReader {
    std::ifstream in;
    std::string path;
    std::string pending;
    bool has_pending = false;
    long line_no = 0;

    explicit SectionReader(const std::string& p) : in(p), path(p) {
        if (!in) throw ParseError(p + ": cannot open file");
    }

    bool next_line(std::string& line) {
        if (has_pending) {
            line = pending;
            has_pending = false;
            return true;
        }
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }

    std::vector<std::vector<std::string>> section(const std::string& name,
                                                  std::size_t n_fields) {
        std::string line;
        if (!next_line(line) || line != "[" + name + "]")
            throw ParseError(path + ": missing section '" + name + "'");
        if (!next_line(line))
            throw ParseError(path + ": section '" + name + "' missing header row");
        std::vector<std::vector<std::string>> rows;
        while (next_line(line)) {
            if (!line.empty() && line[0] == '[') {
                pending = line;
                has_pending = true;
                break;
            }
            auto fields = split_csv_line(line);
            if (fields.size() != n_fields)
                throw ParseError(path + ":" + std::to_string(line_no) + ": section '" + name +
                                 "' expected " + std::to_string(n_fields) + " fields");
            rows.push_back(std::move(fields));
        }
        return rows;
    }
};

} // namespace

LoadedTables load_tables(const std::string& path) {
    SectionReader r(path);
    LoadedTables out;
    for (const auto& row : r.section("seekers", 8)) {
        out.ods.emplace_back(static_cast<NodeId>(parse_int(row[1], "origin")),
                             static_cast<NodeId>(parse_int(row[2], "destination")));
        out.tables.lambda_od.push_back(parse_double(row[3], "lambda_per_s"));
        out.tables.p_seeker.push_back(parse_double(row[4], "p_seeker"));
        out.tables.e_seeker_m.push_back(parse_double(row[5], "e_seeker_m"));
        out.tables.e_vacant_m.push_back(parse_double(row[6], "e_vacant_m"));
        out.tables.vacant_degenerate.push_back(
            static_cast<std::uint8_t>(parse_int(row[7], "degenerate")));
    }
    for (const auto& row : r.section("takers", 10)) {
        TakerState tk;
        tk.od = static_cast<int>(parse_int(row[1], "od"));
        tk.position = static_cast<int>(parse_int(row[2], "position"));
        tk.link = static_cast<LinkId>(parse_int(row[3], "link"));
        tk.tau_s = parse_double(row[4], "tau_s");
        out.takers.push_back(tk);
        out.tables.tau_s.push_back(tk.tau_s);
        out.tables.lambda_taker.push_back(parse_double(row[5], "lambda_taker"));
        out.tables.eta_total.push_back(parse_double(row[6], "eta_total"));
        out.tables.p_taker.push_back(parse_double(row[7], "p_taker"));
        out.tables.rho.push_back(parse_double(row[8], "rho"));
        out.tables.e_taker_m.push_back(parse_double(row[9], "e_taker_m"));
    }
    out.taker_matches.resize(out.takers.size());
    out.tables.eta.resize(out.takers.size());
    for (const auto& row : r.section("eta", 3)) {
        int t = static_cast<int>(parse_int(row[0], "taker"));
        if (t < 0 || t >= static_cast<int>(out.takers.size()))
            throw ParseError(path + ": eta row references unknown taker");
        out.taker_matches[t].push_back(static_cast<int>(parse_int(row[1], "seeker_od")));
        out.tables.eta[t].push_back(parse_double(row[2], "eta_per_s"));
    }
    out.seeker_matches.resize(out.ods.size());
    out.seeker_E.resize(out.ods.size());
    for (const auto& row : r.section("E", 3)) {
        int w = static_cast<int>(parse_int(row[0], "seeker_od"));
        if (w < 0 || w >= static_cast<int>(out.ods.size()))
            throw ParseError(path + ": E row references unknown seeker od");
        out.seeker_matches[w].push_back(static_cast<int>(parse_int(row[1], "taker")));
        out.seeker_E[w].push_back(parse_double(row[2], "E_m"));
    }
    return out;
}

} // namespace ridepool
