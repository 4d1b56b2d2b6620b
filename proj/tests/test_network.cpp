#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "ridepool/network.hpp"
#include "support/brute.hpp"

using namespace ridepool;

namespace {

RoadNetwork line_graph(int n, double len = 1.0) {
    std::vector<NodeId> nodes;
    std::vector<Link> links;
    for (int i = 0; i < n; ++i) nodes.push_back(i);
    for (int i = 0; i + 1 < n; ++i) {
        links.push_back({i, i + 1, len});
        links.push_back({i + 1, i, len});
    }
    return RoadNetwork(std::move(nodes), std::move(links), 10.0);
}

} // namespace

TEST_CASE("line graph distances") {
    RoadNetwork net = line_graph(3);
    CHECK(net.shortest_distance(0, 2) == 2.0);
    CHECK(net.shortest_distance(0, 0) == 0.0);
    CHECK(net.shortest_path_links(0, 0).empty());
    auto links = net.shortest_path_links(0, 2);
    REQUIRE(links.size() == 2);
    CHECK(net.link(links[0]).tail == 0);
    CHECK(net.link(links[0]).head == 1);
    CHECK(net.link(links[1]).head == 2);
}

TEST_CASE("unreachable destination raises") {
    std::vector<NodeId> nodes{0, 1, 2};
    std::vector<Link> links{{0, 1, 5.0}}; // one-way, node 2 isolated
    RoadNetwork net(std::move(nodes), std::move(links), 10.0);
    CHECK_THROWS_AS(net.shortest_distance(0, 2), UnreachableError);
    CHECK_THROWS_AS(net.shortest_path_links(1, 0), UnreachableError);
    CHECK(!net.reachable(0, 2));
    CHECK(net.reachable(0, 1));
}

TEST_CASE("equal-length ties pick the lexicographically smallest node sequence") {
    // 2x2 grid: 0-1 / 2-3; two equal paths 0->1->3 and 0->2->3
    RoadNetwork net = RoadNetwork::grid(2, 2, 100.0, 10.0);
    auto nodes = net.shortest_path_nodes(0, 3);
    CHECK(nodes == std::vector<NodeId>{0, 1, 3});
    // and the reverse direction
    auto rnodes = net.shortest_path_nodes(3, 0);
    CHECK(rnodes == std::vector<NodeId>{3, 1, 0});
}

TEST_CASE("grid distances and paths match exhaustive enumeration") {
    RoadNetwork net = RoadNetwork::grid(5, 5, 1.0, 10.0);
    std::mt19937 gen(7);
    for (int q = 0; q < 20; ++q) {
        NodeId o = static_cast<NodeId>(gen() % 25);
        NodeId d = static_cast<NodeId>(gen() % 25);
        auto expect = brute::shortest_path(net, o, d);
        CHECK(net.shortest_distance(o, d) == doctest::Approx(expect.distance).epsilon(1e-12));
        CHECK(net.shortest_path_nodes(o, d) == expect.nodes);
    }
}

TEST_CASE("random weighted digraph distances match enumeration") {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> len(50.0, 500.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 7;
        std::vector<NodeId> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back(i * 3); // non-contiguous ids
        std::vector<Link> links;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (gen() % 3 == 0) links.push_back({i * 3, j * 3, len(gen)});
            }
        // ensure strong connectivity with a cycle
        for (int i = 0; i < n; ++i) links.push_back({i * 3, ((i + 1) % n) * 3, len(gen)});
        RoadNetwork net(std::move(nodes), std::move(links), 10.0);
        for (int q = 0; q < 15; ++q) {
            NodeId o = static_cast<NodeId>((gen() % n) * 3);
            NodeId d = static_cast<NodeId>((gen() % n) * 3);
            auto expect = brute::shortest_path(net, o, d);
            CHECK(net.shortest_distance(o, d) ==
                  doctest::Approx(expect.distance).epsilon(1e-12));
        }
    }
}

TEST_CASE("path/distance consistency is exact") {
    RoadNetwork net = RoadNetwork::grid(6, 6, 437.25, 10.0);
    for (NodeId o : {0, 7, 35, 14}) {
        for (NodeId d : {0, 5, 30, 35, 17}) {
            double sum = 0.0;
            for (LinkId lid : net.shortest_path_links(o, d)) sum += net.link(lid).length_m;
            CHECK(sum == net.shortest_distance(o, d)); // bitwise, same fold order
        }
    }
}

TEST_CASE("triangle inequality on sampled triples") {
    RoadNetwork net = RoadNetwork::grid(5, 5, 500.0, 10.0);
    std::mt19937 gen(3);
    for (int i = 0; i < 200; ++i) {
        NodeId a = static_cast<NodeId>(gen() % 25);
        NodeId b = static_cast<NodeId>(gen() % 25);
        NodeId c = static_cast<NodeId>(gen() % 25);
        CHECK(net.shortest_distance(a, c) <=
              net.shortest_distance(a, b) + net.shortest_distance(b, c) + 1e-9);
    }
}

TEST_CASE("repeated queries are identical") {
    RoadNetwork net = RoadNetwork::grid(4, 4, 250.0, 10.0);
    auto p1 = net.shortest_path_nodes(0, 15);
    auto d1 = net.shortest_distance(0, 15);
    for (int i = 0; i < 5; ++i) {
        CHECK(net.shortest_path_nodes(0, 15) == p1);
        CHECK(net.shortest_distance(0, 15) == d1);
    }
}

TEST_CASE("csv round trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ridepool_net_test";
    fs::create_directories(dir);
    RoadNetwork net = RoadNetwork::grid(3, 4, 123.5, 10.0);
    net.save_csv((dir / "nodes.csv").string(), (dir / "links.csv").string());
    RoadNetwork loaded =
        RoadNetwork::load_csv((dir / "nodes.csv").string(), (dir / "links.csv").string(), 10.0);
    CHECK(loaded.node_count() == net.node_count());
    CHECK(loaded.link_count() == net.link_count());
    CHECK(loaded.has_coordinates());
    for (NodeId o : {0, 5, 11})
        for (NodeId d : {0, 3, 11})
            CHECK(loaded.shortest_distance(o, d) == net.shortest_distance(o, d));
    fs::remove_all(dir);
}

TEST_CASE("nearest node snapping") {
    RoadNetwork net = RoadNetwork::grid(3, 3, 100.0, 10.0);
    auto hit = net.nearest_node(105.0, 95.0, 50.0); // near (1,1) = node 4
    REQUIRE(hit.has_value());
    CHECK(*hit == 4);
    CHECK(!net.nearest_node(1000.0, 1000.0, 50.0).has_value());
}

TEST_CASE("invalid networks are rejected") {
    CHECK_THROWS(RoadNetwork({0, 1}, {{0, 1, -5.0}}, 10.0));
    CHECK_THROWS(RoadNetwork({0, 1}, {{0, 0, 5.0}}, 10.0));
    CHECK_THROWS(RoadNetwork({0, 1}, {{0, 2, 5.0}}, 10.0));
    CHECK_THROWS(RoadNetwork({0, 0, 1}, {}, 10.0));
    CHECK_THROWS(RoadNetwork({0, 1}, {{0, 1, 5.0}}, 0.0));
}

TEST_CASE("od pair carries the canonical path") {
    RoadNetwork net = RoadNetwork::grid(4, 4, 200.0, 10.0);
    ODPair od = make_od_pair(net, 0, 15);
    double sum = 0.0;
    for (LinkId lid : od.path) sum += net.link(lid).length_m;
    CHECK(sum == od.length_m);
    CHECK(od.length_m == net.shortest_distance(0, 15));
}
