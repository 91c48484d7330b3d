#include "crevsim/mobility.hpp"

#include <algorithm>
#include <cmath>

#include "crevsim/errors.hpp"

namespace crevsim {

Point position_at(const VehicleItinerary& itin, double t_s) {
    const auto& wps = itin.waypoints;
    if (wps.empty()) throw ScenarioError("itinerary has no waypoints");
    if (t_s <= wps.front().t_s) return wps.front().pos;
    if (t_s >= wps.back().t_s) return wps.back().pos;
    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const auto& a = wps[i];
        const auto& b = wps[i + 1];
        if (t_s <= b.t_s) {
            double f = (t_s - a.t_s) / (b.t_s - a.t_s);
            return {a.pos.x + f * (b.pos.x - a.pos.x),
                    a.pos.y + f * (b.pos.y - a.pos.y)};
        }
    }
    return wps.back().pos;
}

namespace {

struct SegState {
    ClusterId owner{0};
    bool covered{false};
};

SegState state_at(const ClusterGrid& grid, const VehicleItinerary& itin,
                  double t_s) {
    Point p = position_at(itin, t_s);
    ClusterId owner = grid.owning_cluster(p);
    bool covered =
        std::hypot(p.x - grid.cluster(owner).center.x,
                   p.y - grid.cluster(owner).center.y) <=
        ClusterGrid::kCoverageRadiusM + 1e-9;
    return {owner, covered};
}

// Candidate transition times within one linear segment: grid-line crossings
// plus coverage-circle crossings of every cluster center.
void segment_candidates(const ClusterGrid& grid, const Waypoint& a,
                        const Waypoint& b, std::vector<double>& out) {
    const double dt = b.t_s - a.t_s;
    if (dt <= 0) return;
    const double dx = b.pos.x - a.pos.x;
    const double dy = b.pos.y - a.pos.y;

    auto add = [&](double f) {
        if (f > 0 && f < 1) out.push_back(a.t_s + f * dt);
    };
    const double side = grid.side();
    if (dx != 0) {
        for (int k = 1; k < grid.cols(); ++k) add((k * side - a.pos.x) / dx);
    }
    if (dy != 0) {
        for (int k = 1; k < grid.rows(); ++k) add((k * side - a.pos.y) / dy);
    }
    // |p(f) - center|^2 = R^2, quadratic in f.
    const double r2 =
        ClusterGrid::kCoverageRadiusM * ClusterGrid::kCoverageRadiusM;
    for (const auto& [id, info] : grid.clusters()) {
        const double ex = a.pos.x - info.center.x;
        const double ey = a.pos.y - info.center.y;
        const double qa = dx * dx + dy * dy;
        const double qb = 2 * (ex * dx + ey * dy);
        const double qc = ex * ex + ey * ey - r2;
        if (qa == 0) continue;
        const double disc = qb * qb - 4 * qa * qc;
        if (disc <= 0) continue;
        const double sq = std::sqrt(disc);
        add((-qb - sq) / (2 * qa));
        add((-qb + sq) / (2 * qa));
    }
}

}  // namespace

std::vector<MobilityEvent> advance(const ClusterGrid& grid,
                                   const VehicleItinerary& itin, double from_s,
                                   double to_s) {
    if (from_s >= to_s) throw ScenarioError("advance: from_s must be < to_s");
    for (const auto& wp : itin.waypoints) {
        if (!grid.in_bounds(wp.pos)) {
            throw ScenarioError("itinerary of " + itin.vehicle.value +
                                " leaves the grid");
        }
    }
    std::vector<MobilityEvent> events;

    std::vector<double> candidates{from_s, to_s};
    for (std::size_t i = 0; i + 1 < itin.waypoints.size(); ++i) {
        const auto& a = itin.waypoints[i];
        const auto& b = itin.waypoints[i + 1];
        if (b.t_s <= from_s || a.t_s >= to_s) continue;
        if (a.t_s > from_s && a.t_s < to_s) candidates.push_back(a.t_s);
        segment_candidates(grid, a, b, candidates);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](double x, double y) {
                                     return std::abs(x - y) < 1e-9;
                                 }),
                     candidates.end());
    candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                    [&](double t) {
                                        return t < from_s || t > to_s;
                                    }),
                     candidates.end());

    // State per inter-candidate interval, sampled at midpoints; transitions
    // land on the shared candidate time.
    if (candidates.size() >= 2) {
        SegState prev =
            state_at(grid, itin, (candidates[0] + candidates[1]) / 2);
        for (std::size_t i = 1; i + 1 < candidates.size(); ++i) {
            double t = candidates[i];
            SegState cur =
                state_at(grid, itin, (candidates[i] + candidates[i + 1]) / 2);
            Time at = seconds_to_us(t);
            if (cur.owner != prev.owner) {
                if (!grid.cluster(prev.owner).neighbors.contains(cur.owner)) {
                    throw ScenarioError("itinerary of " + itin.vehicle.value +
                                        " crosses a corner point");
                }
                if (prev.covered && !cur.covered) {
                    events.push_back({at, EnterGreyArea{itin.vehicle}});
                }
                Point p = position_at(itin, t);
                RsuId guard = grid.guard_rsu(cur.owner, prev.owner, p);
                events.push_back(
                    {at, BorderCrossing{itin.vehicle, prev.owner, cur.owner,
                                        guard}});
                if (!prev.covered && cur.covered) {
                    events.push_back({at, LeaveGreyArea{itin.vehicle, cur.owner}});
                }
            } else if (prev.covered && !cur.covered) {
                events.push_back({at, EnterGreyArea{itin.vehicle}});
            } else if (!prev.covered && cur.covered) {
                events.push_back({at, LeaveGreyArea{itin.vehicle, cur.owner}});
            }
            prev = cur;
        }
    }

    for (const auto& ev : itin.events) {
        if (ev.t_s <= from_s || ev.t_s > to_s) continue;
        Point p = position_at(itin, ev.t_s);
        // Vehicles talk to their own cluster's infrastructure; without the
        // restriction a neighbor-owned guard co-located on the shared edge
        // could win the distance tie.
        RsuId via = (ev.kind == ScriptedEvent::Kind::GreyRequest)
                        ? grid.nearest_rsu(p, ev.cluster)
                        : grid.nearest_rsu(p, grid.owning_cluster(p));
        events.push_back({seconds_to_us(ev.t_s),
                          ScriptedAction{itin.vehicle, ev, via}});
    }

    std::stable_sort(events.begin(), events.end(),
                     [](const MobilityEvent& a, const MobilityEvent& b) {
                         return a.at < b.at;
                     });
    return events;
}

}  // namespace crevsim
