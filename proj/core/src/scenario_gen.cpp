#include "crevsim/scenario_gen.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

#include "crevsim/topology.hpp"

namespace crevsim {

namespace {

ClusterId pick_neighbor(const ClusterInfo& info, std::mt19937_64& rng) {
    std::vector<ClusterId> n(info.neighbors.begin(), info.neighbors.end());
    return n[rng() % n.size()];
}

}  // namespace

ScenarioConfig generate_scenario(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

    ScenarioConfig cfg;
    cfg.name = "rand" + std::to_string(seed);
    cfg.seed = seed;
    cfg.seed_set = true;
    cfg.rows = 2 + static_cast<int>(rng() % 2);
    cfg.cols = 2 + static_cast<int>(rng() % 2);
    cfg.side_m = 2000;
    cfg.rsus_per_border = 1;
    cfg.broadcast_period_s = 60;
    cfg.t_end_s = 600;
    cfg.speed_limit_mps = 25;

    const ClusterGrid grid =
        ClusterGrid::build(cfg.rows, cfg.cols, cfg.side_m, cfg.rsus_per_border);

    int next = 1;
    auto fresh_id = [&] { return CertificateId{"V" + std::to_string(next++)}; };

    // One stationary clean anchor per cluster: c2c targets and witnesses for
    // the revocation lists' effect.
    std::map<ClusterId, CertificateId> anchor;
    for (const auto& [id, info] : grid.clusters()) {
        VehicleSpec v;
        v.id = fresh_id();
        v.itinerary.vehicle = v.id;
        v.itinerary.waypoints = {{0, info.center}, {cfg.t_end_s, info.center}};
        anchor[id] = v.id;
        cfg.vehicles.push_back(std::move(v));
    }

    const int n_adversaries = 1 + static_cast<int>(rng() % 8);
    std::vector<ClusterId> cluster_pool;
    for (const auto& [id, info] : grid.clusters()) cluster_pool.push_back(id);

    for (int i = 0; i < n_adversaries; ++i) {
        VehicleSpec v;
        v.id = fresh_id();
        v.itinerary.vehicle = v.id;
        v.adversary = true;

        const ClusterId start = cluster_pool[rng() % cluster_pool.size()];
        const int hops = 1 + static_cast<int>(rng() % 2);
        const double t0 = 60.0 + 15.0 * i;  // staggered departures
        const double hop_s = 100;           // 2000 m at 20 m/s

        ClusterId here = start;
        Point pos = grid.cluster(here).center;
        v.itinerary.waypoints = {{0, pos}, {t0, pos}};
        double t = t0;
        ClusterId before_last = start;
        for (int h = 0; h < hops; ++h) {
            before_last = here;
            here = pick_neighbor(grid.cluster(here), rng);
            pos = grid.cluster(here).center;
            if (h > 0) {
                v.itinerary.waypoints.push_back(
                    {t + 30, v.itinerary.waypoints.back().pos});
                t += 30;
            }
            t += hop_s;
            v.itinerary.waypoints.push_back({t, pos});
        }

        // Cache the start anchor's PK before leaving; after the last crossing
        // rotates the abandoned cluster, send there with the retained
        // signature.
        v.itinerary.events.push_back(
            {t0 - 10, ScriptedEvent::Kind::SendC2C, anchor.at(start), "hi",
             false, 0});
        if (hops == 2) {
            // Mid-journey dwell: learn the intermediate anchor's PK too.
            v.itinerary.events.push_back(
                {t0 + hop_s + 15, ScriptedEvent::Kind::SendC2C,
                 anchor.at(before_last), "hi", false, 0});
        }
        v.itinerary.events.push_back(
            {t + 30, ScriptedEvent::Kind::SendC2C, anchor.at(before_last),
             "late", true, 0});

        cfg.revoked.push_back({v.id, start});
        cfg.vehicles.push_back(std::move(v));
    }

    // Clean movers: wander inside one cluster's coverage and chat with the
    // local anchor. Never revoked, never crossing.
    const int n_movers = static_cast<int>(rng() % 7);
    for (int i = 0; i < n_movers; ++i) {
        VehicleSpec v;
        v.id = fresh_id();
        v.itinerary.vehicle = v.id;
        const ClusterId home = cluster_pool[rng() % cluster_pool.size()];
        const Point c = grid.cluster(home).center;
        const double dx = (rng() % 2 ? 1 : -1) * (200.0 + rng() % 300);
        const double dy = (rng() % 2 ? 1 : -1) * (200.0 + rng() % 300);
        const double leave = 100.0 + rng() % 50;
        v.itinerary.waypoints = {{0, c},
                                 {leave, c},
                                 {leave + 60, {c.x + dx, c.y + dy}}};
        v.itinerary.events.push_back(
            {250.0 + rng() % 150, ScriptedEvent::Kind::SendC2C,
             anchor.at(home), "ping", false, 0});
        cfg.vehicles.push_back(std::move(v));
    }

    // A few revoked-but-parked vehicles: their certs must sit in exactly one
    // list from start to finish.
    const int n_parked = static_cast<int>(rng() % 3);
    for (int i = 0; i < n_parked; ++i) {
        VehicleSpec v;
        v.id = fresh_id();
        v.itinerary.vehicle = v.id;
        v.adversary = true;
        const ClusterId home = cluster_pool[rng() % cluster_pool.size()];
        const Point c = grid.cluster(home).center;
        v.itinerary.waypoints = {{0, {c.x + 100, c.y}}};
        cfg.revoked.push_back({v.id, home});
        cfg.vehicles.push_back(std::move(v));
    }

    validate_scenario(cfg);
    return cfg;
}

}  // namespace crevsim
