#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crevsim/errors.hpp"
#include "crevsim/mobility.hpp"

using namespace crevsim;

namespace {

VehicleItinerary itin(const char* id, std::vector<Waypoint> wps,
                      std::vector<ScriptedEvent> evs = {}) {
    return {CertificateId{id}, std::move(wps), std::move(evs)};
}

template <typename T>
std::vector<T> pick(const std::vector<MobilityEvent>& evs) {
    std::vector<T> out;
    for (const auto& e : evs) {
        if (auto* p = std::get_if<T>(&e.what)) out.push_back(*p);
    }
    return out;
}

}  // namespace

TEST_CASE("position_at interpolates and clamps at both ends") {
    auto v = itin("V1", {{10, {0, 0}}, {20, {100, 0}}, {30, {100, 50}}});
    CHECK(position_at(v, 0).x == 0);        // before the first waypoint
    CHECK(position_at(v, 15).x == doctest::Approx(50));
    CHECK(position_at(v, 25).y == doctest::Approx(25));
    CHECK(position_at(v, 99).y == 50);      // after the last waypoint
    CHECK_THROWS_AS(position_at(itin("V1", {}), 0), ScenarioError);
}

TEST_CASE("parked vehicle produces no events") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    auto v = itin("V1", {{0, {1000, 1000}}});
    CHECK(advance(g, v, 0, 100).empty());
    CHECK_THROWS_AS(advance(g, v, 50, 50), ScenarioError);
}

TEST_CASE("center-to-center drive crosses the border exactly once") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    auto v = itin("V1", {{10, {1000, 1000}}, {110, {3000, 1000}}});
    auto evs = advance(g, v, 0, 200);

    auto crossings = pick<BorderCrossing>(evs);
    REQUIRE(crossings.size() == 1);
    CHECK(crossings[0].from == 1);
    CHECK(crossings[0].to == 2);
    // Handled by the destination's guard facing the origin.
    CHECK(g.rsu(crossings[0].rsu).cluster == 2);
    CHECK(g.rsu(crossings[0].rsu).faces == 1);
    // Edge midpoint reached halfway through the 100 s segment.
    CHECK(evs[0].at == seconds_to_us(60));
    // Covered on both sides of this crossing: no grey transitions.
    CHECK(pick<EnterGreyArea>(evs).empty());
    CHECK(pick<LeaveGreyArea>(evs).empty());
}

TEST_CASE("detour into a cluster corner enters and leaves the grey area") {
    auto g = ClusterGrid::build(2, 2, 2000, 1);
    auto v = itin("V1", {{0, {1000, 1000}},
                         {100, {200, 200}},
                         {200, {1000, 1000}}});
    auto evs = advance(g, v, 0, 200);
    REQUIRE(evs.size() == 2);
    CHECK(std::holds_alternative<EnterGreyArea>(evs[0].what));
    auto leave = std::get<LeaveGreyArea>(evs[1].what);
    CHECK(leave.into == 1);
    // Coverage circle hit where the diagonal is 1000 m from the center.
    CHECK(us_to_seconds(evs[0].at) ==
          doctest::Approx(100.0 * 1000.0 / std::hypot(800, 800)));
    CHECK(pick<BorderCrossing>(evs).empty());
}

TEST_CASE("path through a corner point is rejected") {
    auto g = ClusterGrid::build(2, 2, 2000, 1);
    auto v = itin("V9", {{0, {1000, 1000}}, {100, {3000, 3000}}});
    CHECK_THROWS_AS(advance(g, v, 0, 100), ScenarioError);
    auto off = itin("V9", {{0, {1000, 1000}}, {100, {9000, 1000}}});
    CHECK_THROWS_WITH_AS(advance(g, off, 0, 100),
                         "itinerary of V9 leaves the grid", ScenarioError);
}

TEST_CASE("two borders crossed in time order") {
    auto g = ClusterGrid::build(1, 3, 2000, 1);
    auto v = itin("V1", {{0, {1000, 1000}}, {200, {5000, 1000}}});
    auto evs = advance(g, v, 0, 200);
    auto crossings = pick<BorderCrossing>(evs);
    REQUIRE(crossings.size() == 2);
    CHECK(crossings[0].from == 1);
    CHECK(crossings[0].to == 2);
    CHECK(crossings[1].from == 2);
    CHECK(crossings[1].to == 3);
    CHECK(evs[0].at < evs[1].at);
    CHECK(evs[0].at == seconds_to_us(50));
    CHECK(evs[1].at == seconds_to_us(150));
}

TEST_CASE("split windows see the same crossings as one pass") {
    auto g = ClusterGrid::build(1, 3, 2000, 1);
    auto v = itin("V1", {{0, {1000, 1000}}, {200, {5000, 1000}}});
    auto first = advance(g, v, 0, 100);
    auto second = advance(g, v, 100, 200);
    REQUIRE(pick<BorderCrossing>(first).size() == 1);
    REQUIRE(pick<BorderCrossing>(second).size() == 1);
    CHECK(pick<BorderCrossing>(first)[0].to == 2);
    CHECK(pick<BorderCrossing>(second)[0].to == 3);
}

TEST_CASE("scripted actions resolve to the vehicle's own cluster's RSU") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    // Both guards are co-located at (2000, 1000); a plain nearest-RSU pick
    // would tie-break to cluster 1's guard even for a cluster-2 vehicle.
    ScriptedEvent send{120, ScriptedEvent::Kind::SendC2C, CertificateId{"V2"},
                       "hi", false, 0};
    auto v = itin("V1", {{0, {2050, 1000}}}, {send});
    auto evs = advance(g, v, 0, 200);
    REQUIRE(evs.size() == 1);
    auto act = std::get<ScriptedAction>(evs[0].what);
    CHECK(evs[0].at == seconds_to_us(120));
    CHECK(act.event.payload == "hi");
    CHECK(g.rsu(act.via_rsu).cluster == 2);

    // A grey-area request names the cluster whose signature it wants and is
    // routed to that cluster's infrastructure instead.
    ScriptedEvent grey{130, ScriptedEvent::Kind::GreyRequest, {}, "", false, 1};
    auto w = itin("V1", {{0, {2050, 1000}}}, {grey});
    auto acts = pick<ScriptedAction>(advance(g, w, 0, 200));
    REQUIRE(acts.size() == 1);
    CHECK(g.rsu(acts[0].via_rsu).cluster == 1);
}

TEST_CASE("scripted actions outside the window are skipped") {
    auto g = ClusterGrid::build(1, 2, 2000, 1);
    ScriptedEvent e1{50, ScriptedEvent::Kind::ReportSafety, {}, "a", false, 0};
    ScriptedEvent e2{150, ScriptedEvent::Kind::ReportSafety, {}, "b", false, 0};
    auto v = itin("V1", {{0, {1000, 1000}}}, {e1, e2});
    auto acts = pick<ScriptedAction>(advance(g, v, 50, 150));
    REQUIRE(acts.size() == 1);  // t=50 belongs to the previous window
    CHECK(acts[0].event.payload == "b");
}
