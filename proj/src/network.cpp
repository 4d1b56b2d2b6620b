#include "ridepool/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "ridepool/csv.hpp"

namespace ridepool {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RoadNetwork::RoadNetwork(std::vector<NodeId> nodes, std::vector<Link> links, double speed_mps)
    : node_ids_(std::move(nodes)), links_(std::move(links)), speed_mps_(speed_mps) {
    if (speed_mps_ <= 0.0) throw std::invalid_argument("speed must be positive");
    std::sort(node_ids_.begin(), node_ids_.end());
    if (std::adjacent_find(node_ids_.begin(), node_ids_.end()) != node_ids_.end())
        throw std::invalid_argument("duplicate node id");
    for (const Link& l : links_) {
        if (l.length_m <= 0.0) throw std::invalid_argument("link length must be positive");
        if (l.tail == l.head) throw std::invalid_argument("self-loop link");
        if (!has_node(l.tail) || !has_node(l.head))
            throw std::invalid_argument("link endpoint is not a known node");
    }
    build_adjacency();
    compute_all_pairs();
}

bool RoadNetwork::has_node(NodeId id) const {
    return std::binary_search(node_ids_.begin(), node_ids_.end(), id);
}

int RoadNetwork::index_of(NodeId id) const {
    auto it = std::lower_bound(node_ids_.begin(), node_ids_.end(), id);
    if (it == node_ids_.end() || *it != id)
        throw std::invalid_argument("unknown node id " + std::to_string(id));
    return static_cast<int>(it - node_ids_.begin());
}

void RoadNetwork::build_adjacency() {
    const int n = static_cast<int>(node_ids_.size());
    out_.assign(n, {});
    in_min_.assign(n, {});
    for (LinkId lid = 0; lid < static_cast<LinkId>(links_.size()); ++lid) {
        out_[index_of(links_[lid].tail)].push_back(lid);
    }
    for (auto& v : out_) {
        std::sort(v.begin(), v.end(), [this](LinkId a, LinkId b) {
            if (links_[a].head != links_[b].head) return links_[a].head < links_[b].head;
            return a < b;
        });
    }
    // one in-link per (tail, head): the shortest, ties to the smaller link id
    std::map<std::pair<int, int>, LinkId> best;
    for (LinkId lid = 0; lid < static_cast<LinkId>(links_.size()); ++lid) {
        int t = index_of(links_[lid].tail);
        int h = index_of(links_[lid].head);
        auto [it, inserted] = best.try_emplace({h, t}, lid);
        if (!inserted && links_[lid].length_m < links_[it->second].length_m) it->second = lid;
    }
    for (const auto& [key, lid] : best) in_min_[key.first].push_back(lid); // sorted by tail idx
}

void RoadNetwork::compute_all_pairs() {
    const int n = static_cast<int>(node_ids_.size());
    dist_.assign(static_cast<std::size_t>(n) * n, kInf);
    parent_link_.assign(static_cast<std::size_t>(n) * n, -1);

    std::vector<int> head_idx(links_.size()), tail_idx(links_.size());
    for (LinkId lid = 0; lid < static_cast<LinkId>(links_.size()); ++lid) {
        head_idx[lid] = index_of(links_[lid].head);
        tail_idx[lid] = index_of(links_[lid].tail);
    }

    std::vector<double> dist(n);
    std::vector<char> done(n);
    std::vector<int> order;
    std::vector<int> par(n), parlink(n);
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        order.clear();
        dist[s] = 0.0;
        using Entry = std::pair<double, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [dv, v] = pq.top();
            pq.pop();
            if (done[v]) continue;
            done[v] = 1;
            order.push_back(v);
            for (LinkId lid : out_[v]) {
                int h = head_idx[lid];
                double nd = dv + links_[lid].length_m;
                if (nd < dist[h]) {
                    dist[h] = nd;
                    pq.push({nd, h});
                }
            }
        }

        // Canonical parents: among equal-length predecessors pick the one whose
        // full node sequence is lexicographically smallest. Candidates always
        // have strictly smaller distance, so their paths are already final.
        std::fill(par.begin(), par.end(), -1);
        std::fill(parlink.begin(), parlink.end(), -1);
        auto build_path = [&](int v) {
            std::vector<int> p;
            for (int x = v; x != -1; x = par[x]) p.push_back(x);
            std::reverse(p.begin(), p.end());
            return p;
        };
        double* drow = &dist_[static_cast<std::size_t>(s) * n];
        std::int32_t* prow = &parent_link_[static_cast<std::size_t>(s) * n];
        drow[s] = 0.0;
        for (int v : order) {
            if (v == s) continue;
            int best_u = -1;
            LinkId best_link = -1;
            std::vector<int> best_path;
            for (LinkId lid : in_min_[v]) {
                int u = tail_idx[lid];
                if (dist[u] == kInf) continue;
                if (dist[u] + links_[lid].length_m != dist[v]) continue;
                auto cand = build_path(u);
                cand.push_back(v);
                if (best_u == -1 || cand < best_path) {
                    best_path = std::move(cand);
                    best_u = u;
                    best_link = lid;
                }
            }
            par[v] = best_u;
            parlink[v] = best_link;
            // re-accumulate along the canonical chain so the distance equals the
            // left-to-right sum of the reported path's link lengths, exactly
            drow[v] = drow[best_u] + links_[best_link].length_m;
            prow[v] = best_link;
        }
    }
}

double RoadNetwork::shortest_distance(NodeId o, NodeId d) const {
    int oi = index_of(o), di = index_of(d);
    double v = dist_[static_cast<std::size_t>(oi) * node_ids_.size() + di];
    if (v == kInf) throw UnreachableError(o, d);
    return v;
}

bool RoadNetwork::reachable(NodeId o, NodeId d) const {
    int oi = index_of(o), di = index_of(d);
    return dist_[static_cast<std::size_t>(oi) * node_ids_.size() + di] != kInf;
}

std::vector<LinkId> RoadNetwork::shortest_path_links(NodeId o, NodeId d) const {
    int oi = index_of(o), di = index_of(d);
    const std::size_t n = node_ids_.size();
    if (dist_[static_cast<std::size_t>(oi) * n + di] == kInf) throw UnreachableError(o, d);
    std::vector<LinkId> path;
    int v = di;
    while (v != oi) {
        LinkId lid = parent_link_[static_cast<std::size_t>(oi) * n + v];
        path.push_back(lid);
        v = index_of(links_[lid].tail);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<NodeId> RoadNetwork::shortest_path_nodes(NodeId o, NodeId d) const {
    std::vector<NodeId> nodes{o};
    for (LinkId lid : shortest_path_links(o, d)) nodes.push_back(links_[lid].head);
    return nodes;
}

const std::vector<LinkId>& RoadNetwork::out_links(NodeId id) const { return out_[index_of(id)]; }

void RoadNetwork::set_coordinates(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != node_ids_.size() || ys.size() != node_ids_.size())
        throw std::invalid_argument("coordinate count mismatch");
    xs_ = std::move(xs);
    ys_ = std::move(ys);
}

std::optional<NodeId> RoadNetwork::nearest_node(double x, double y, double radius_m) const {
    if (!has_coordinates()) return std::nullopt;
    int best = -1;
    double best_d2 = radius_m * radius_m;
    for (std::size_t i = 0; i < node_ids_.size(); ++i) {
        double dx = xs_[i] - x, dy = ys_[i] - y;
        double d2 = dx * dx + dy * dy;
        if (d2 <= best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return std::nullopt;
    return node_ids_[best];
}

RoadNetwork RoadNetwork::grid(int rows, int cols, double link_length_m, double speed_mps) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs at least one row and column");
    std::vector<NodeId> nodes;
    nodes.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) nodes.push_back(r * cols + c);
    std::vector<Link> links;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            NodeId id = r * cols + c;
            if (c + 1 < cols) {
                links.push_back({id, id + 1, link_length_m});
                links.push_back({id + 1, id, link_length_m});
            }
            if (r + 1 < rows) {
                links.push_back({id, id + cols, link_length_m});
                links.push_back({id + cols, id, link_length_m});
            }
        }
    }
    RoadNetwork net(std::move(nodes), std::move(links), speed_mps);
    std::vector<double> xs, ys;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            xs.push_back(c * link_length_m);
            ys.push_back(r * link_length_m);
        }
    net.set_coordinates(std::move(xs), std::move(ys));
    return net;
}

RoadNetwork RoadNetwork::load_csv(const std::string& nodes_path, const std::string& links_path,
                                  double speed_mps) {
    CsvReader nodes_csv(nodes_path);
    int id_col = nodes_csv.column("node_id");
    bool with_coords = false;
    int x_col = -1, y_col = -1;
    for (std::size_t i = 0; i < nodes_csv.header().size(); ++i) {
        if (nodes_csv.header()[i] == "x_m") x_col = static_cast<int>(i);
        if (nodes_csv.header()[i] == "y_m") y_col = static_cast<int>(i);
    }
    with_coords = x_col >= 0 && y_col >= 0;

    std::vector<NodeId> nodes;
    std::vector<double> xs, ys;
    std::vector<std::string> row;
    while (nodes_csv.next(row)) {
        nodes.push_back(static_cast<NodeId>(parse_int(row[id_col], "node_id")));
        if (with_coords) {
            xs.push_back(parse_double(row[x_col], "x_m"));
            ys.push_back(parse_double(row[y_col], "y_m"));
        }
    }

    CsvReader links_csv(links_path);
    int t_col = links_csv.column("tail");
    int h_col = links_csv.column("head");
    int l_col = links_csv.column("length_m");
    std::vector<Link> links;
    while (links_csv.next(row)) {
        links.push_back({static_cast<NodeId>(parse_int(row[t_col], "tail")),
                         static_cast<NodeId>(parse_int(row[h_col], "head")),
                         parse_double(row[l_col], "length_m")});
    }

    // coordinates must follow the sorted node order used internally
    if (with_coords) {
        std::vector<std::size_t> perm(nodes.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
        std::vector<double> sx(xs.size()), sy(ys.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            sx[i] = xs[perm[i]];
            sy[i] = ys[perm[i]];
        }
        RoadNetwork net(std::move(nodes), std::move(links), speed_mps);
        net.set_coordinates(std::move(sx), std::move(sy));
        return net;
    }
    return RoadNetwork(std::move(nodes), std::move(links), speed_mps);
}

void RoadNetwork::save_csv(const std::string& nodes_path, const std::string& links_path) const {
    std::ofstream nf(nodes_path);
    if (!nf) throw std::runtime_error(nodes_path + ": cannot open for writing");
    if (has_coordinates()) {
        nf << "node_id,x_m,y_m\n";
        for (std::size_t i = 0; i < node_ids_.size(); ++i)
            nf << node_ids_[i] << ',' << format_double(xs_[i]) << ',' << format_double(ys_[i])
               << '\n';
    } else {
        nf << "node_id\n";
        for (NodeId id : node_ids_) nf << id << '\n';
    }
    std::ofstream lf(links_path);
    if (!lf) throw std::runtime_error(links_path + ": cannot open for writing");
    lf << "tail,head,length_m\n";
    for (const Link& l : links_)
        lf << l.tail << ',' << l.head << ',' << format_double(l.length_m) << '\n';
}

ODPair make_od_pair(const RoadNetwork& net, NodeId origin, NodeId destination) {
    ODPair od;
    od.origin = origin;
    od.destination = destination;
    od.path = net.shortest_path_links(origin, destination);
    od.length_m = net.shortest_distance(origin, destination);
    return od;
}

} // namespace ridepool
