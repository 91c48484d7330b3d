#include "crevsim/runner.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "crevsim/errors.hpp"

namespace crevsim {

namespace {

Time ms_to_us(double ms) { return seconds_to_us(ms / 1000.0); }

}  // namespace

World build_world(const ScenarioConfig& cfg, std::ostream* trace) {
    World w;
    w.trace = trace;
    w.grid = ClusterGrid::build(cfg.rows, cfg.cols, cfg.side_m,
                                cfg.rsus_per_border, cfg.interior_rsus,
                                cfg.cluster_ids);

    w.channel.latency_vehicle_rsu = ms_to_us(cfg.latency_vehicle_rsu_ms);
    w.channel.latency_rsu_lca = ms_to_us(cfg.latency_rsu_lca_ms);
    w.channel.latency_broadcast = ms_to_us(cfg.latency_broadcast_ms);
    w.channel.jitter_max = ms_to_us(cfg.jitter_ms);
    w.channel.loss_prob = cfg.loss;
    w.channel.rng.seed(cfg.seed);

    w.sizing = MessageSizing::defaults();
    w.sizing.entry_size_bytes = cfg.entry_size_bytes;
    w.sizing.header_bytes = cfg.header_bytes;
    for (const auto& [kind, bytes] : cfg.msg_size_overrides) {
        w.sizing.fixed_bytes[kind] = bytes;
    }

    w.crl.set_entry_size_bytes(cfg.entry_size_bytes);
    for (std::size_t i = 1; i <= cfg.baseline_seed_entries; ++i) {
        w.crl.revoke(CertificateId{"CRLSEED" + std::to_string(i)});
    }

    for (const auto& [id, info] : w.grid.clusters()) {
        LcaState lca;
        lca.cluster = id;
        lca.lccl = Lccl(id);
        lca.group_sig = ClusterSignature{id, 1};
        lca.broadcast_period = seconds_to_us(cfg.broadcast_period_s);
        lca.local_rsus.insert(info.rsus.begin(), info.rsus.end());
        w.lcas.emplace(id, std::move(lca));
    }
    for (const auto& [rid, placement] : w.grid.rsus()) {
        if (placement.border_guard) {
            // This guard faces us from the neighbor's side: it receives our
            // cross-border broadcasts.
            w.lcas.at(placement.faces).neighbor_rsus.insert(rid);
        }
    }

    // Initial revocations, batched per cluster in file order.
    std::map<ClusterId, std::vector<CertificateId>> initial;
    for (const auto& rev : cfg.revoked) {
        initial[rev.cluster].push_back(rev.cert);
        w.crl.revoke(rev.cert);
    }
    for (auto& [cluster, certs] : initial) {
        w.lcas.at(cluster).lccl.insert_front(certs);
    }

    for (const auto& [rid, placement] : w.grid.rsus()) {
        RsuState rsu;
        rsu.id = rid;
        rsu.cluster = placement.cluster;
        rsu.own_keys = KeyPair::derive("RSU" + std::to_string(rid));
        const LcaState& lca = w.lcas.at(placement.cluster);
        rsu.local_lccl = lca.lccl;
        rsu.group_sig = lca.group_sig;
        std::set<ClusterId> adjacent;
        if (placement.border_guard) adjacent.insert(placement.faces);
        rsu.nccl = Nccl(rid, adjacent);
        if (placement.border_guard) {
            rsu.nccl.absorb(placement.faces,
                            w.lcas.at(placement.faces).lccl);
        }
        w.rsus.emplace(rid, std::move(rsu));
    }

    for (const auto& spec : cfg.vehicles) {
        VehicleState v;
        v.keys = KeyPair::derive(spec.id.value);
        v.cert = Certificate{spec.id, v.keys.pk, "CA"};
        v.is_adversary = spec.adversary;
        const Point start = position_at(spec.itinerary, 0.0);
        if (auto home = w.grid.locate(start)) {
            const LcaState& lca = w.lcas.at(*home);
            v.lccl = lca.lccl;
            v.lccl_version_seen = lca.lccl.version();
            v.group_sig = lca.group_sig;
            v.current_cluster = *home;
            w.lcas.at(*home).member_vehicles.insert(spec.id);
            for (RsuId rid : w.grid.cluster(*home).rsus) {
                w.rsus.at(rid).known_vehicle_pks[spec.id] = v.keys.pk;
            }
        } else {
            v.lccl = Lccl(w.grid.owning_cluster(start));
        }
        w.vehicles.emplace(spec.id, std::move(v));
    }

    // Mobility precomputed over the full horizon; roster order breaks
    // same-instant scheduling ties.
    for (const auto& spec : cfg.vehicles) {
        const ActorId self = ActorId::vehicle(spec.id);
        for (const auto& ev :
             advance(w.grid, spec.itinerary, 0.0, cfg.t_end_s)) {
            std::visit(
                [&](const auto& what) { w.schedule(ev.at, self, self, what); },
                ev.what);
        }
    }
    return w;
}

RunReport summarize(const World& world, const ScenarioConfig& cfg) {
    RunReport report;
    report.scenario = cfg.name;
    report.seed = cfg.seed;
    report.stats = world.stats;

    std::uint64_t max_lccl_bytes = 0;
    for (const auto& [id, lca] : world.lcas) {
        ClusterReport cr;
        for (const auto& e : lca.lccl.entries()) cr.final_entries.push_back(e.value);
        cr.version = lca.lccl.version();
        cr.epoch = lca.group_sig.epoch;
        cr.max_bytes = lccl_size_bytes(lca.lccl, cfg.entry_size_bytes,
                                       cfg.header_bytes);
        if (auto it = world.stats.lccl_series.find(id);
            it != world.stats.lccl_series.end()) {
            cr.series = it->second;
            for (const auto& s : it->second) {
                cr.max_bytes = std::max(cr.max_bytes, s.bytes);
            }
        }
        max_lccl_bytes = std::max(max_lccl_bytes, cr.max_bytes);
        report.clusters.emplace(id, std::move(cr));
    }

    BaselineReport& b = report.baseline;
    b.entries = world.crl.entries().size();
    b.workload_entries = b.entries - std::count_if(
        world.crl.entries().begin(), world.crl.entries().end(),
        [](const CertificateId& c) {
            return c.value.rfind("CRLSEED", 0) == 0;
        });
    b.bytes = world.crl.size_bytes();
    b.distribution_s = crl_distribution_time_s(world.crl, cfg.baseline_model);
    b.worst_lookup_cost = b.entries;  // linear scan, miss walks the whole list
    b.max_lccl_bytes = max_lccl_bytes;
    b.lccl_distribution_s = distribution_time_s(max_lccl_bytes, cfg.baseline_model);
    b.byte_ratio = max_lccl_bytes == 0
                       ? 0.0
                       : static_cast<double>(b.bytes) / max_lccl_bytes;
    report.broadcast_delivery_s =
        us_to_seconds(world.channel.base_latency(LinkClass::Broadcast));
    return report;
}

RunReport run_scenario(const ScenarioConfig& cfg, std::ostream* trace) {
    if (trace) write_trace_header(*trace, scenario_to_json(cfg));
    World world = build_world(cfg, trace);
    world.schedule_initial_timers();
    world.run_until(seconds_to_us(cfg.t_end_s));
    return summarize(world, cfg);
}

}  // namespace crevsim
