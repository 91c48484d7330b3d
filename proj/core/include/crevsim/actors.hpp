#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crevsim/crypto.hpp"
#include "crevsim/ids.hpp"
#include "crevsim/lists.hpp"
#include "crevsim/messages.hpp"

namespace crevsim {

// --- Actions emitted by actor transitions --------------------------------

enum class Scope {
    ClusterMembers,  // member vehicles + local RSUs of the actor's cluster
    NeighborRsus,    // RSUs of adjacent clusters facing the actor's cluster
    LocalRsus,       // all RSUs of the actor's cluster
    OtherLocalRsus,  // local RSUs minus an excluded reporter
};

struct SendAction {
    ActorId to;
    ProtocolMessage msg;
};
struct BroadcastAction {
    Scope scope{Scope::ClusterMembers};
    ProtocolMessage msg;
    std::optional<RsuId> exclude_rsu;  // used with OtherLocalRsus
};
struct SetTimerAction {
    Time at{0};
    std::uint64_t generation{0};
};
struct MetricAction {
    std::string kind;
    double value{1};
};
struct AcceptAction {
    std::string payload;
};
struct RejectAction {
    std::string reason;
};

using Action = std::variant<SendAction, BroadcastAction, SetTimerAction,
                            MetricAction, AcceptAction, RejectAction>;
using Actions = std::vector<Action>;

// Reject reasons (stable strings used in traces and report tallies).
namespace reject {
inline constexpr const char* kDecryptionFailure = "DecryptionFailure";
inline constexpr const char* kBadClusterSignature = "BadClusterSignature";
inline constexpr const char* kRevokedSender = "RevokedSender";
inline constexpr const char* kMalformedHello = "MalformedHello";
inline constexpr const char* kNoGroupSignature = "NoGroupSignature";
inline constexpr const char* kGreyAreaDenied = "GreyAreaDenied";
}  // namespace reject

// Metric kinds.
namespace metric {
inline constexpr const char* kForeignReporter = "ForeignReporter";
inline constexpr const char* kCrossClusterBroadcastDropped = "CrossClusterBroadcastDropped";
inline constexpr const char* kStaleLcclDropped = "StaleLcclDropped";
inline constexpr const char* kNcclLookupCost = "NcclLookupCost";
inline constexpr const char* kLcclLookupCost = "LcclLookupCost";
inline constexpr const char* kPkUnknown = "PkUnknown";
inline constexpr const char* kGreyAreaDenied = "GreyAreaDenied";
inline constexpr const char* kZeroListWindow = "ZeroListWindow";
}  // namespace metric

// --- Actor states ---------------------------------------------------------

struct LcaState {
    ClusterId cluster{0};
    Lccl lccl;
    ClusterSignature group_sig;
    Time broadcast_period{seconds_to_us(60)};
    Time next_broadcast_at{0};
    std::uint64_t timer_generation{0};
    std::set<RsuId> local_rsus;
    std::set<RsuId> neighbor_rsus;
    std::set<CertificateId> member_vehicles;
    std::vector<std::string> news;  // FIFO safety reports
    std::uint64_t state_version{0};
};

struct RsuState {
    RsuId id{0};
    ClusterId cluster{0};
    KeyPair own_keys;
    Lccl local_lccl;
    Nccl nccl;
    ClusterSignature group_sig;
    std::map<CertificateId, PublicKeyId> known_vehicle_pks;
    std::vector<std::string> news;
    std::uint64_t state_version{0};
};

struct VehicleState {
    Certificate cert;
    KeyPair keys;  // TPD-resident
    Lccl lccl;
    std::uint64_t lccl_version_seen{0};
    std::optional<ClusterSignature> group_sig;
    std::optional<ClusterSignature> prev_group_sig;  // retained across rotations
    std::optional<ClusterId> current_cluster;        // nullopt = grey area
    bool is_adversary{false};  // workload ground truth, never read by protocol logic
    std::map<CertificateId, PublicKeyId> known_pks;  // cached PK lookups
    struct PendingC2C {
        std::string payload;
        bool use_stale{false};
    };
    std::map<CertificateId, PendingC2C> pending_c2c;
    std::vector<std::string> news_received;
    std::uint64_t state_version{0};
};

// --- RSU transitions -------------------------------------------------------

// Border handshake, steps 1-4: record the vehicle's PK, provision it with
// {rsu pk, cluster signature, local LCCL, cluster news}, relay the hello to
// the LCA (membership + cluster-wide PK knowledge), then search the NCCL.
// On a hit with origin N: Send AddRequest to the own LCA before Send
// RemoveRequest to N's LCA (Add has the higher priority).
Actions rsu_on_vehicle_hello(RsuState& rsu, const VehicleHello& hello, Time now);

Actions rsu_on_pk_request(RsuState& rsu, const PkRequest& req,
                          const ActorId& requester);

// Grey-area flow: NCCL miss grants {group signature, local LCCL}; a hit is
// denied and reported exactly like a border hit.
Actions rsu_on_grey_area_request(RsuState& rsu, const GreyAreaRequest& req,
                                 Time now);

Actions rsu_on_safety_report(RsuState& rsu, const SafetyReport& rep);

// From own LCA: refresh the local snapshot (and epoch). From a neighbor
// LCA: absorb into the NCCL.
Actions rsu_on_lccl_broadcast(RsuState& rsu, const LcclBroadcast& b,
                              ClusterId origin);

// LCA fan-out of a hello seen elsewhere in the cluster: learn the PK.
Actions rsu_on_hello_fanout(RsuState& rsu, const VehicleHello& hello);

Actions rsu_on_safety_fanout(RsuState& rsu, const SafetyReport& rep);

// --- LCA transitions -------------------------------------------------------

// Batched Add: requests delivered at the same instant produce a single
// prepend and one broadcast; the transmission timer is reset. Duplicate
// certs are no-ops; an all-duplicate batch emits nothing.
Actions lca_on_add(LcaState& lca, std::span<const AddRequest> batch, Time now);

// Remove + signature rotation + rotation broadcast. Absent cert is a
// complete no-op (no rotation, no broadcast).
Actions lca_on_remove(LcaState& lca, const RemoveRequest& rm, Time now);

// Periodic broadcast. Stale generations (superseded by a timer reset) are
// ignored.
Actions lca_on_timer(LcaState& lca, Time now, std::uint64_t generation);

// Relayed hello: membership tracking + PK fan-out to local RSUs.
Actions lca_on_hello_relay(LcaState& lca, const VehicleHello& hello);

Actions lca_on_safety(LcaState& lca, const SafetyReport& rep,
                      std::optional<RsuId> reporter);

// --- Vehicle transitions ----------------------------------------------------

Actions vehicle_on_crossing(VehicleState& v, ClusterId from, ClusterId to,
                            RsuId guard);

Actions vehicle_on_news(VehicleState& v, const LocalClusterNews& news);

Actions vehicle_on_lccl_broadcast(VehicleState& v, const LcclBroadcast& b);

Actions vehicle_on_signature_rotation(VehicleState& v,
                                      const SignatureRotation& rot);

// Scripted send: uses a cached PK when available, otherwise asks via_rsu.
// use_stale seals with the pre-rotation signature the vehicle retained.
Actions vehicle_send_c2c(VehicleState& v, const CertificateId& target,
                         const std::string& payload, bool use_stale,
                         const ActorId& via_rsu);

Actions vehicle_on_pk_response(VehicleState& v, const PkResponse& resp);

// Receive pipeline, exactly: (1) open with the private key, (2) verify the
// cluster signature against the current epoch, (3) LCCL lookup with
// promotion; reject reasons DecryptionFailure / BadClusterSignature /
// RevokedSender in that order.
Actions vehicle_receive_c2c(VehicleState& v, const C2CMessage& msg);

Actions vehicle_on_grey_grant(VehicleState& v, const GreyAreaGrant& grant);

Actions vehicle_on_coverage_change(VehicleState& v,
                                   std::optional<ClusterId> covered_by);

Actions vehicle_report_safety(VehicleState& v, const std::string& body,
                              const ActorId& via_rsu);

Actions vehicle_request_grey_access(VehicleState& v, const ActorId& via_rsu);

}  // namespace crevsim
