#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridepool {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

struct Link {
    NodeId tail;
    NodeId head;
    double length_m;
};

struct UnreachableError : std::runtime_error {
    UnreachableError(NodeId o, NodeId d)
        : std::runtime_error("no path from node " + std::to_string(o) + " to node " +
                             std::to_string(d)) {}
};

/// Directed road graph with a network-wide constant speed. All-pairs shortest
/// paths are precomputed at construction. Ties between equal-length paths are
/// broken toward the lexicographically smallest node-id sequence, so reported
/// paths are reproducible across runs.
class RoadNetwork {
public:
    RoadNetwork(std::vector<NodeId> nodes, std::vector<Link> links, double speed_mps);

    // rows x cols lattice, bidirectional arcs, node id = row * cols + col.
    // Nodes carry planar coordinates (col * len, row * len).
    static RoadNetwork grid(int rows, int cols, double link_length_m, double speed_mps);

    // nodes CSV header: node_id[,x_m,y_m]; links CSV header: tail,head,length_m
    static RoadNetwork load_csv(const std::string& nodes_path, const std::string& links_path,
                                double speed_mps);
    void save_csv(const std::string& nodes_path, const std::string& links_path) const;

    double speed_mps() const { return speed_mps_; }
    std::size_t node_count() const { return node_ids_.size(); }
    std::size_t link_count() const { return links_.size(); }
    const std::vector<NodeId>& nodes() const { return node_ids_; }
    const Link& link(LinkId id) const { return links_[id]; }
    bool has_node(NodeId id) const;
    double link_travel_time_s(LinkId id) const { return links_[id].length_m / speed_mps_; }

    double shortest_distance(NodeId o, NodeId d) const; // throws UnreachableError
    bool reachable(NodeId o, NodeId d) const;
    std::vector<LinkId> shortest_path_links(NodeId o, NodeId d) const;
    std::vector<NodeId> shortest_path_nodes(NodeId o, NodeId d) const;

    // Outgoing link ids of a node, sorted by (head id, link id).
    const std::vector<LinkId>& out_links(NodeId id) const;

    bool has_coordinates() const { return !xs_.empty(); }
    // Nearest node by Euclidean distance, if within radius_m.
    std::optional<NodeId> nearest_node(double x, double y, double radius_m) const;
    void set_coordinates(std::vector<double> xs, std::vector<double> ys);

private:
    int index_of(NodeId id) const;
    void build_adjacency();
    void compute_all_pairs();

    std::vector<NodeId> node_ids_;      // sorted
    std::vector<Link> links_;
    double speed_mps_;
    std::vector<double> xs_, ys_;       // optional, indexed like node_ids_

    std::vector<std::vector<LinkId>> out_;      // by node index
    std::vector<std::vector<LinkId>> in_min_;   // per node index: min-length in-link per tail
    std::vector<double> dist_;                  // n*n, row-major by node index
    std::vector<std::int32_t> parent_link_;     // n*n, link id into node, -1 at source/unreachable
};

/// An origin-destination pair together with its canonical shortest path.
struct ODPair {
    NodeId origin = -1;
    NodeId destination = -1;
    std::vector<LinkId> path; // ordered links origin -> destination
    double length_m = 0.0;
};

ODPair make_od_pair(const RoadNetwork& net, NodeId origin, NodeId destination);

} // namespace ridepool
