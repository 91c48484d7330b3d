#include "crevsim/actors.hpp"

#include <algorithm>

namespace crevsim {

namespace {

// Reset the transmission timer: the next periodic broadcast happens exactly
// one period after `now`, and any previously scheduled fire goes stale.
SetTimerAction reset_timer(LcaState& lca, Time now) {
    lca.next_broadcast_at = now + lca.broadcast_period;
    ++lca.timer_generation;
    return SetTimerAction{lca.next_broadcast_at, lca.timer_generation};
}

void broadcast_lccl(const LcaState& lca, Actions& out) {
    LcclBroadcast msg{lca.lccl, lca.group_sig.epoch};
    out.push_back(BroadcastAction{Scope::ClusterMembers, msg, std::nullopt});
    out.push_back(BroadcastAction{Scope::NeighborRsus, msg, std::nullopt});
}

}  // namespace

// --- RSU --------------------------------------------------------------------

Actions rsu_on_vehicle_hello(RsuState& rsu, const VehicleHello& hello, Time now) {
    (void)now;
    Actions out;
    if (hello.cert.id.value.empty() || hello.pk.value.empty()) {
        out.push_back(RejectAction{reject::kMalformedHello});
        return out;
    }
    rsu.known_vehicle_pks[hello.cert.id] = hello.pk;
    ++rsu.state_version;

    // Step 2: provision the vehicle with our PK, cluster signature, the
    // current LCCL and the cluster news.
    out.push_back(SendAction{
        ActorId::vehicle(hello.cert.id),
        LocalClusterNews{rsu.news, rsu.local_lccl, rsu.group_sig,
                         rsu.own_keys.pk}});

    // Relay to the LCA for membership tracking and cluster-wide PK knowledge.
    out.push_back(SendAction{ActorId::lca(rsu.cluster), hello});

    // Steps 3-4: NCCL search; on a hit report Add (higher priority) before
    // Remove toward the origin cluster.
    auto hit = rsu.nccl.contains(hello.cert.id);
    out.push_back(MetricAction{metric::kNcclLookupCost,
                               static_cast<double>(hit.scan_cost)});
    if (hit.found) {
        out.push_back(SendAction{ActorId::lca(rsu.cluster),
                                 AddRequest{hello.cert.id, rsu.id}});
        out.push_back(SendAction{ActorId::lca(*hit.origin),
                                 RemoveRequest{hello.cert.id, rsu.id}});
    }
    return out;
}

Actions rsu_on_pk_request(RsuState& rsu, const PkRequest& req,
                          const ActorId& requester) {
    Actions out;
    auto it = rsu.known_vehicle_pks.find(req.target);
    if (it != rsu.known_vehicle_pks.end()) {
        out.push_back(SendAction{requester, PkResponse{req.target, it->second}});
    } else {
        out.push_back(SendAction{requester, PkResponse{req.target, std::nullopt}});
        out.push_back(MetricAction{metric::kPkUnknown, 1});
    }
    return out;
}

Actions rsu_on_grey_area_request(RsuState& rsu, const GreyAreaRequest& req,
                                 Time now) {
    (void)now;
    Actions out;
    rsu.known_vehicle_pks[req.cert.id] = req.pk;
    ++rsu.state_version;
    auto hit = rsu.nccl.contains(req.cert.id);
    out.push_back(MetricAction{metric::kNcclLookupCost,
                               static_cast<double>(hit.scan_cost)});
    if (!hit.found) {
        out.push_back(SendAction{ActorId::vehicle(req.cert.id),
                                 GreyAreaGrant{rsu.group_sig, rsu.local_lccl}});
    } else {
        out.push_back(RejectAction{reject::kGreyAreaDenied});
        out.push_back(MetricAction{metric::kGreyAreaDenied, 1});
        out.push_back(SendAction{ActorId::lca(rsu.cluster),
                                 AddRequest{req.cert.id, rsu.id}});
        out.push_back(SendAction{ActorId::lca(*hit.origin),
                                 RemoveRequest{req.cert.id, rsu.id}});
    }
    return out;
}

Actions rsu_on_safety_report(RsuState& rsu, const SafetyReport& rep) {
    rsu.news.push_back(rep.body);
    ++rsu.state_version;
    return {SendAction{ActorId::lca(rsu.cluster), rep}};
}

Actions rsu_on_safety_fanout(RsuState& rsu, const SafetyReport& rep) {
    rsu.news.push_back(rep.body);
    ++rsu.state_version;
    return {};
}

Actions rsu_on_lccl_broadcast(RsuState& rsu, const LcclBroadcast& b,
                              ClusterId origin) {
    Actions out;
    if (origin == rsu.cluster) {
        if (b.lccl.version() >= rsu.local_lccl.version()) {
            rsu.local_lccl = b.lccl;
            if (b.epoch > rsu.group_sig.epoch) rsu.group_sig.epoch = b.epoch;
            ++rsu.state_version;
        } else {
            out.push_back(MetricAction{metric::kStaleLcclDropped, 1});
        }
    } else {
        if (rsu.nccl.absorb(origin, b.lccl)) {
            ++rsu.state_version;
        } else {
            out.push_back(MetricAction{metric::kStaleLcclDropped, 1});
        }
    }
    return out;
}

Actions rsu_on_hello_fanout(RsuState& rsu, const VehicleHello& hello) {
    rsu.known_vehicle_pks[hello.cert.id] = hello.pk;
    ++rsu.state_version;
    return {};
}

// --- LCA --------------------------------------------------------------------

Actions lca_on_add(LcaState& lca, std::span<const AddRequest> batch, Time now) {
    Actions out;
    std::vector<CertificateId> certs;
    for (const auto& add : batch) {
        if (!lca.local_rsus.contains(add.reporter)) {
            out.push_back(MetricAction{metric::kForeignReporter, 1});
            continue;
        }
        certs.push_back(add.cert);
    }
    if (certs.empty()) return out;
    if (!lca.lccl.insert_front(certs)) return out;  // all duplicates: no-op
    ++lca.state_version;
    broadcast_lccl(lca, out);
    out.push_back(reset_timer(lca, now));
    return out;
}

Actions lca_on_remove(LcaState& lca, const RemoveRequest& rm, Time now) {
    Actions out;
    if (!lca.lccl.remove(rm.cert)) return out;  // absent: no-op
    lca.group_sig = rotate_signature(lca.group_sig);
    ++lca.state_version;
    broadcast_lccl(lca, out);
    out.push_back(reset_timer(lca, now));
    return out;
}

Actions lca_on_timer(LcaState& lca, Time now, std::uint64_t generation) {
    if (generation != lca.timer_generation) return {};  // superseded by a reset
    Actions out;
    ++lca.state_version;
    broadcast_lccl(lca, out);
    out.push_back(reset_timer(lca, now));
    return out;
}

Actions lca_on_hello_relay(LcaState& lca, const VehicleHello& hello) {
    lca.member_vehicles.insert(hello.cert.id);
    ++lca.state_version;
    return {BroadcastAction{Scope::LocalRsus, hello, std::nullopt}};
}

Actions lca_on_safety(LcaState& lca, const SafetyReport& rep,
                      std::optional<RsuId> reporter) {
    lca.news.push_back(rep.body);
    ++lca.state_version;
    return {BroadcastAction{Scope::OtherLocalRsus, rep, reporter}};
}

// --- Vehicle ------------------------------------------------------------------

Actions vehicle_on_crossing(VehicleState& v, ClusterId from, ClusterId to,
                            RsuId guard) {
    (void)from;
    (void)to;
    return {SendAction{ActorId::rsu(guard), VehicleHello{v.cert, v.keys.pk}}};
}

namespace {

void adopt_signature(VehicleState& v, const ClusterSignature& sig) {
    if (v.group_sig && *v.group_sig != sig) v.prev_group_sig = v.group_sig;
    v.group_sig = sig;
}

}  // namespace

Actions vehicle_on_news(VehicleState& v, const LocalClusterNews& news) {
    if (news.lccl.cluster() != v.lccl.cluster() ||
        news.lccl.version() >= v.lccl_version_seen) {
        v.lccl = news.lccl;
        v.lccl_version_seen = news.lccl.version();
    }
    adopt_signature(v, news.group_sig);
    v.current_cluster = news.lccl.cluster();
    v.news_received.insert(v.news_received.end(), news.news.begin(),
                           news.news.end());
    ++v.state_version;
    return {};
}

Actions vehicle_on_lccl_broadcast(VehicleState& v, const LcclBroadcast& b) {
    Actions out;
    if (!v.current_cluster || b.lccl.cluster() != *v.current_cluster) {
        out.push_back(MetricAction{metric::kCrossClusterBroadcastDropped, 1});
        return out;
    }
    if (b.lccl.cluster() != v.lccl.cluster() ||
        b.lccl.version() > v.lccl_version_seen) {
        v.lccl = b.lccl;
        v.lccl_version_seen = b.lccl.version();
        if (v.group_sig && v.group_sig->cluster == b.lccl.cluster() &&
            b.epoch > v.group_sig->epoch) {
            adopt_signature(v, ClusterSignature{b.lccl.cluster(), b.epoch});
        }
        ++v.state_version;
    } else {
        out.push_back(MetricAction{metric::kStaleLcclDropped, 1});
    }
    return out;
}

Actions vehicle_on_signature_rotation(VehicleState& v,
                                      const SignatureRotation& rot) {
    if (v.group_sig && v.group_sig->cluster == rot.cluster &&
        rot.new_epoch > v.group_sig->epoch) {
        adopt_signature(v, ClusterSignature{rot.cluster, rot.new_epoch});
        ++v.state_version;
    }
    return {};
}

namespace {

std::optional<ClusterSignature> pick_signature(const VehicleState& v,
                                               bool use_stale) {
    if (use_stale && v.prev_group_sig) return v.prev_group_sig;
    return v.group_sig;
}

}  // namespace

Actions vehicle_send_c2c(VehicleState& v, const CertificateId& target,
                         const std::string& payload, bool use_stale,
                         const ActorId& via_rsu) {
    Actions out;
    auto sig = pick_signature(v, use_stale);
    if (!sig) {
        out.push_back(RejectAction{reject::kNoGroupSignature});
        return out;
    }
    auto pk = v.known_pks.find(target);
    if (pk != v.known_pks.end()) {
        auto env = seal_c2c(payload, v.keys, v.cert, *sig, pk->second);
        out.push_back(SendAction{ActorId::vehicle(target), C2CMessage{env}});
        return out;
    }
    v.pending_c2c[target] = {payload, use_stale};
    ++v.state_version;
    out.push_back(SendAction{via_rsu, PkRequest{target}});
    return out;
}

Actions vehicle_on_pk_response(VehicleState& v, const PkResponse& resp) {
    Actions out;
    auto pending = v.pending_c2c.find(resp.target);
    if (!resp.pk) {
        if (pending != v.pending_c2c.end()) v.pending_c2c.erase(pending);
        ++v.state_version;
        out.push_back(MetricAction{metric::kPkUnknown, 1});
        return out;
    }
    v.known_pks[resp.target] = *resp.pk;
    ++v.state_version;
    if (pending == v.pending_c2c.end()) return out;
    auto sig = pick_signature(v, pending->second.use_stale);
    if (!sig) {
        v.pending_c2c.erase(pending);
        out.push_back(RejectAction{reject::kNoGroupSignature});
        return out;
    }
    auto env = seal_c2c(pending->second.payload, v.keys, v.cert, *sig, *resp.pk);
    out.push_back(SendAction{ActorId::vehicle(resp.target), C2CMessage{env}});
    v.pending_c2c.erase(pending);
    return out;
}

Actions vehicle_receive_c2c(VehicleState& v, const C2CMessage& msg) {
    Actions out;
    auto opened = open_c2c(msg.envelope, v.keys.sk);
    if (!opened) {
        out.push_back(RejectAction{reject::kDecryptionFailure});
        return out;
    }
    if (!v.group_sig || opened->group_sig != *v.group_sig) {
        out.push_back(RejectAction{reject::kBadClusterSignature});
        return out;
    }
    auto r = v.lccl.lookup_promote(opened->sender_cert.id);
    out.push_back(MetricAction{metric::kLcclLookupCost,
                               static_cast<double>(r.scan_cost)});
    if (r.found) {
        ++v.state_version;  // promoted list is retained
        out.push_back(RejectAction{reject::kRevokedSender});
        return out;
    }
    out.push_back(AcceptAction{opened->payload});
    return out;
}

Actions vehicle_on_grey_grant(VehicleState& v, const GreyAreaGrant& grant) {
    adopt_signature(v, grant.group_sig);
    if (grant.lccl.cluster() != v.lccl.cluster() ||
        grant.lccl.version() >= v.lccl_version_seen) {
        v.lccl = grant.lccl;
        v.lccl_version_seen = grant.lccl.version();
    }
    ++v.state_version;
    return {};
}

Actions vehicle_on_coverage_change(VehicleState& v,
                                   std::optional<ClusterId> covered_by) {
    if (!covered_by) {
        v.current_cluster = std::nullopt;
    } else if (v.group_sig && v.group_sig->cluster == *covered_by) {
        v.current_cluster = covered_by;
    }
    ++v.state_version;
    return {};
}

Actions vehicle_report_safety(VehicleState& v, const std::string& body,
                              const ActorId& via_rsu) {
    (void)v;
    return {SendAction{via_rsu, SafetyReport{body}}};
}

Actions vehicle_request_grey_access(VehicleState& v, const ActorId& via_rsu) {
    return {SendAction{via_rsu, GreyAreaRequest{v.cert, v.keys.pk}}};
}

}  // namespace crevsim
