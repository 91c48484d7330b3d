#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crevsim/errors.hpp"
#include "crevsim/topology.hpp"

using namespace crevsim;

TEST_CASE("minimal 1x2 grid: two clusters, one guarded border each side") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    CHECK(g.clusters().size() == 2);
    CHECK(g.cluster(1).neighbors == std::set<ClusterId>{2});
    CHECK(g.cluster(2).neighbors == std::set<ClusterId>{1});

    int guards_1 = 0, guards_2 = 0;
    for (const auto& [id, p] : g.rsus()) {
        CHECK(p.border_guard);
        if (p.cluster == 1) {
            ++guards_1;
            CHECK(p.faces == 2);
        } else {
            ++guards_2;
            CHECK(p.faces == 1);
        }
        // Guards sit on the shared edge x = 2000.
        CHECK(p.position.x == doctest::Approx(2000));
    }
    CHECK(guards_1 == 1);
    CHECK(guards_2 == 1);
}

TEST_CASE("3x3 grid: center cluster has four neighbors") {
    auto g = ClusterGrid::build(3, 3, 2000, 1);
    CHECK(g.cluster(5).neighbors == std::set<ClusterId>{2, 4, 6, 8});
    CHECK(g.clusters().size() == 9);
}

TEST_CASE("coverage geometry: corners are grey, centers are not") {
    auto g = ClusterGrid::build(2, 2, 2000, 1);
    // Half-diagonal of a 2000 m cell is ~1414 m > the 1000 m radius.
    const double half_diag = std::hypot(1000.0, 1000.0);
    CHECK(half_diag > ClusterGrid::kCoverageRadiusM);

    CHECK(g.locate({1000, 1000}) == 1);       // cluster center
    CHECK_FALSE(g.locate({50, 50}).has_value());    // corner, grey
    CHECK_FALSE(g.locate({1980, 30}).has_value());  // near the cell corner
    CHECK(g.owning_cluster({50, 50}) == 1);   // still owned by the box
}

TEST_CASE("edge midpoint: covered, owned by the lower cluster id") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    Point mid{2000, 1000};  // exactly 1000 m from both centers
    CHECK(g.owning_cluster(mid) == 1);
    CHECK(g.locate(mid) == 1);
}

TEST_CASE("locate is total over the grid and never double-assigns") {
    auto g = ClusterGrid::build(2, 3, 2000, 1);
    for (double x = 0; x <= g.width(); x += 250) {
        for (double y = 0; y <= g.height(); y += 250) {
            Point p{x, y};
            auto c = g.locate(p);
            ClusterId owner = g.owning_cluster(p);
            if (c) CHECK(*c == owner);  // coverage implies ownership
        }
    }
    CHECK_THROWS_AS(g.owning_cluster({-1, 0}), TopologyError);
    CHECK_THROWS_AS(g.locate({0, 1e9}), TopologyError);
}

TEST_CASE("guard lookup picks the guard of the destination facing the origin") {
    auto g = ClusterGrid::build(2, 3, 2000, 1, 0, {5, 1, 6, 3, 2, 4});
    // Cluster 1 is the top middle cell; guards in N,E,S,W order.
    RsuId from6 = g.guard_rsu(1, 6, {4000, 1000});
    RsuId from2 = g.guard_rsu(1, 2, {3000, 2000});
    RsuId from5 = g.guard_rsu(1, 5, {2000, 1000});
    CHECK(g.rsu(from6).faces == 6);
    CHECK(g.rsu(from2).faces == 2);
    CHECK(g.rsu(from5).faces == 5);
    CHECK(g.rsu(from6).cluster == 1);
    CHECK(g.rsu(from2).cluster == 1);
    CHECK(g.rsu(from5).cluster == 1);
    CHECK_THROWS_AS(g.guard_rsu(1, 4, {0, 0}), TopologyError);  // not adjacent
}

TEST_CASE("several guards per border: nearest along the edge wins") {
    auto g = ClusterGrid::build(1, 2, 2000, 3);
    // Cluster 1's guards facing 2 sit at y = 500, 1000, 1500 on x=2000.
    RsuId low = g.guard_rsu(1, 2, {2000, 400});
    RsuId high = g.guard_rsu(1, 2, {2000, 1600});
    CHECK(low != high);
    CHECK(g.rsu(low).position.y == doctest::Approx(500));
    CHECK(g.rsu(high).position.y == doctest::Approx(1500));
}

TEST_CASE("cluster id remap validation") {
    CHECK_THROWS_AS(ClusterGrid::build(1, 2, 2000, 1, 0, {1, 1}),
                    TopologyError);
    CHECK_THROWS_AS(ClusterGrid::build(1, 2, 2000, 1, 0, {1, 2, 3}),
                    TopologyError);
    CHECK_THROWS_AS(ClusterGrid::build(0, 2, 2000, 1), TopologyError);
    CHECK_THROWS_AS(ClusterGrid::build(1, 2, -5, 1), TopologyError);
}

TEST_CASE("nearest rsu, optionally restricted to a cluster") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    // Both guards sit at (2000, 1000); the tie breaks to the lower id.
    RsuId any = g.nearest_rsu({1900, 1000});
    CHECK(any == 1);
    RsuId own = g.nearest_rsu({2100, 1000}, 2);
    CHECK(g.rsu(own).cluster == 2);
}
