#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crevsim/actors.hpp"

using namespace crevsim;

namespace {

RsuState make_border_rsu() {
    RsuState rsu;
    rsu.id = 2;
    rsu.cluster = 1;
    rsu.own_keys = KeyPair::derive("RSU2");
    rsu.local_lccl = Lccl(1);
    rsu.local_lccl.insert_front({CertificateId{"V11"}});
    rsu.group_sig = {1, 1};
    rsu.nccl = Nccl(2, {6});
    Lccl l6(6);
    l6.insert_front({CertificateId{"V25"}});
    rsu.nccl.absorb(6, l6);
    return rsu;
}

VehicleState make_vehicle(const char* id, ClusterId cluster, int epoch) {
    VehicleState v;
    v.keys = KeyPair::derive(id);
    v.cert = {CertificateId{id}, v.keys.pk, "CA"};
    v.lccl = Lccl(cluster);
    v.group_sig = ClusterSignature{cluster, static_cast<std::uint64_t>(epoch)};
    v.current_cluster = cluster;
    return v;
}

template <typename T>
std::vector<T> pick(const Actions& a) {
    std::vector<T> out;
    for (const auto& act : a) {
        if (auto* p = std::get_if<T>(&act)) out.push_back(*p);
    }
    return out;
}

}  // namespace

// --- RSU ---------------------------------------------------------------------

TEST_CASE("border hello with an NCCL hit: provision, relay, add before remove") {
    auto rsu = make_border_rsu();
    VehicleHello hello{{CertificateId{"V25"}, PublicKeyId{"pk/V25"}, "CA"},
                       PublicKeyId{"pk/V25"}};
    auto out = rsu_on_vehicle_hello(rsu, hello, seconds_to_us(30));

    auto sends = pick<SendAction>(out);
    REQUIRE(sends.size() == 4);
    CHECK(sends[0].to == ActorId::vehicle(CertificateId{"V25"}));
    auto news = std::get<LocalClusterNews>(sends[0].msg);
    CHECK(news.group_sig == ClusterSignature{1, 1});
    CHECK(news.lccl.contains(CertificateId{"V11"}));
    CHECK(news.rsu_pk == rsu.own_keys.pk);

    CHECK(sends[1].to == ActorId::lca(1));
    CHECK(message_kind(sends[1].msg) == "VehicleHello");

    // Add to the receiving cluster strictly before Remove to the origin.
    CHECK(sends[2].to == ActorId::lca(1));
    auto add = std::get<AddRequest>(sends[2].msg);
    CHECK(add.cert.value == "V25");
    CHECK(add.reporter == rsu.id);
    CHECK(sends[3].to == ActorId::lca(6));
    CHECK(std::get<RemoveRequest>(sends[3].msg).cert.value == "V25");

    CHECK(rsu.known_vehicle_pks.at(CertificateId{"V25"}).value == "pk/V25");
    auto metrics = pick<MetricAction>(out);
    REQUIRE(metrics.size() == 1);
    CHECK(metrics[0].kind == metric::kNcclLookupCost);
}

TEST_CASE("border hello with a clean record: provision and relay only") {
    auto rsu = make_border_rsu();
    VehicleHello hello{{CertificateId{"V7"}, PublicKeyId{"pk/V7"}, "CA"},
                       PublicKeyId{"pk/V7"}};
    auto out = rsu_on_vehicle_hello(rsu, hello, 0);
    auto sends = pick<SendAction>(out);
    REQUIRE(sends.size() == 2);
    CHECK(message_kind(sends[0].msg) == "LocalClusterNews");
    CHECK(message_kind(sends[1].msg) == "VehicleHello");
    CHECK(pick<RejectAction>(out).empty());
}

TEST_CASE("malformed hello is rejected without side effects") {
    auto rsu = make_border_rsu();
    auto before = rsu.state_version;
    VehicleHello hello{{CertificateId{""}, PublicKeyId{"pk"}, "CA"},
                       PublicKeyId{"pk"}};
    auto out = rsu_on_vehicle_hello(rsu, hello, 0);
    REQUIRE(out.size() == 1);
    CHECK(std::get<RejectAction>(out[0]).reason == reject::kMalformedHello);
    CHECK(rsu.state_version == before);
}

TEST_CASE("grey-area request: miss granted, hit denied and reported") {
    auto rsu = make_border_rsu();
    GreyAreaRequest clean{{CertificateId{"V7"}, PublicKeyId{"pk/V7"}, "CA"},
                          PublicKeyId{"pk/V7"}};
    auto granted = rsu_on_grey_area_request(rsu, clean, 0);
    auto sends = pick<SendAction>(granted);
    REQUIRE(sends.size() == 1);
    auto grant = std::get<GreyAreaGrant>(sends[0].msg);
    CHECK(grant.group_sig == ClusterSignature{1, 1});
    CHECK(pick<RejectAction>(granted).empty());

    GreyAreaRequest bad{{CertificateId{"V25"}, PublicKeyId{"pk/V25"}, "CA"},
                        PublicKeyId{"pk/V25"}};
    auto denied = rsu_on_grey_area_request(rsu, bad, 0);
    auto rejects = pick<RejectAction>(denied);
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason == reject::kGreyAreaDenied);
    auto reports = pick<SendAction>(denied);
    REQUIRE(reports.size() == 2);
    CHECK(std::holds_alternative<AddRequest>(reports[0].msg));
    CHECK(reports[1].to == ActorId::lca(6));
}

TEST_CASE("pk requests answer from the registry, adversaries included") {
    auto rsu = make_border_rsu();
    rsu.known_vehicle_pks[CertificateId{"V25"}] = PublicKeyId{"pk/V25"};
    auto requester = ActorId::vehicle(CertificateId{"V1"});

    auto known = rsu_on_pk_request(rsu, PkRequest{CertificateId{"V25"}}, requester);
    REQUIRE(known.size() == 1);
    auto resp = std::get<PkResponse>(std::get<SendAction>(known[0]).msg);
    REQUIRE(resp.pk.has_value());  // revocation checks happen at the receiver
    CHECK(resp.pk->value == "pk/V25");

    auto unknown =
        rsu_on_pk_request(rsu, PkRequest{CertificateId{"V99"}}, requester);
    CHECK_FALSE(
        std::get<PkResponse>(std::get<SendAction>(unknown[0]).msg).pk.has_value());
    CHECK(pick<MetricAction>(unknown).size() == 1);
}

TEST_CASE("rsu lccl broadcasts: own cluster refreshes, neighbor absorbs") {
    auto rsu = make_border_rsu();

    Lccl own(1);
    own.insert_front({CertificateId{"V11"}});
    own.insert_front({CertificateId{"V8"}});
    CHECK(rsu_on_lccl_broadcast(rsu, LcclBroadcast{own, 2}, 1).empty());
    CHECK(rsu.local_lccl.contains(CertificateId{"V8"}));
    CHECK(rsu.group_sig.epoch == 2);

    Lccl stale(1);  // version 0 < current snapshot
    auto dropped = rsu_on_lccl_broadcast(rsu, LcclBroadcast{stale, 9}, 1);
    REQUIRE(pick<MetricAction>(dropped).size() == 1);
    CHECK(rsu.group_sig.epoch == 2);

    Lccl l6(6);
    l6.insert_front({CertificateId{"V25"}});
    l6.insert_front({CertificateId{"V30"}});
    CHECK(rsu_on_lccl_broadcast(rsu, LcclBroadcast{l6, 1}, 6).empty());
    CHECK(rsu.nccl.contains(CertificateId{"V30"}).found);
}

// --- LCA ---------------------------------------------------------------------

TEST_CASE("add batch: single prepend, one broadcast pair, timer reset") {
    LcaState lca;
    lca.cluster = 1;
    lca.group_sig = {1, 1};
    lca.local_rsus = {1, 2, 3};
    lca.broadcast_period = seconds_to_us(60);

    std::vector<AddRequest> batch{{CertificateId{"V8"}, 1},
                                  {CertificateId{"V25"}, 2},
                                  {CertificateId{"V5"}, 3}};
    auto out = lca_on_add(lca, batch, seconds_to_us(30));

    CHECK(lca.lccl.entries().front().value == "V8");
    CHECK(lca.lccl.entries().size() == 3);
    auto bcasts = pick<BroadcastAction>(out);
    REQUIRE(bcasts.size() == 2);
    CHECK(bcasts[0].scope == Scope::ClusterMembers);
    CHECK(bcasts[1].scope == Scope::NeighborRsus);
    CHECK(std::get<LcclBroadcast>(bcasts[0].msg).lccl.version() == 1);

    auto timers = pick<SetTimerAction>(out);
    REQUIRE(timers.size() == 1);
    CHECK(timers[0].at == seconds_to_us(90));
    CHECK(timers[0].generation == 1);

    // All-duplicate batch: nothing at all.
    auto again = lca_on_add(lca, batch, seconds_to_us(31));
    CHECK(again.empty());
    CHECK(lca.lccl.version() == 1);
}

TEST_CASE("add requests from a foreign reporter are discarded") {
    LcaState lca;
    lca.cluster = 1;
    lca.local_rsus = {1};
    std::vector<AddRequest> batch{{CertificateId{"V8"}, 99}};
    auto out = lca_on_add(lca, batch, 0);
    REQUIRE(pick<MetricAction>(out).size() == 1);
    CHECK(pick<MetricAction>(out)[0].kind == metric::kForeignReporter);
    CHECK(pick<BroadcastAction>(out).empty());
    CHECK(lca.lccl.entries().empty());

    // Mixed batch: only the locally reported cert lands.
    std::vector<AddRequest> mixed{{CertificateId{"V8"}, 99},
                                  {CertificateId{"V9"}, 1}};
    lca_on_add(lca, mixed, 0);
    CHECK(lca.lccl.entries().size() == 1);
    CHECK(lca.lccl.contains(CertificateId{"V9"}));
}

TEST_CASE("remove rotates the signature; absent cert is a full no-op") {
    LcaState lca;
    lca.cluster = 6;
    lca.group_sig = {6, 1};
    lca.local_rsus = {9};
    lca_on_add(lca, std::vector<AddRequest>{{CertificateId{"V25"}, 9}}, 0);

    auto out = lca_on_remove(lca, RemoveRequest{CertificateId{"V25"}, 2},
                             seconds_to_us(30));
    CHECK(lca.group_sig.epoch == 2);
    CHECK(lca.lccl.entries().empty());
    auto bcasts = pick<BroadcastAction>(out);
    REQUIRE(bcasts.size() == 2);
    CHECK(std::get<LcclBroadcast>(bcasts[0].msg).epoch == 2);
    CHECK(pick<SetTimerAction>(out).size() == 1);

    auto noop = lca_on_remove(lca, RemoveRequest{CertificateId{"V99"}, 2}, 0);
    CHECK(noop.empty());
    CHECK(lca.group_sig.epoch == 2);
}

TEST_CASE("timer fires only for the current generation") {
    LcaState lca;
    lca.cluster = 1;
    lca.group_sig = {1, 1};
    lca.local_rsus = {1};
    lca_on_add(lca, std::vector<AddRequest>{{CertificateId{"V8"}, 1}},
               seconds_to_us(10));  // generation now 1, fire at 70

    CHECK(lca_on_timer(lca, seconds_to_us(60), 0).empty());  // superseded

    auto out = lca_on_timer(lca, seconds_to_us(70), 1);
    CHECK(pick<BroadcastAction>(out).size() == 2);
    auto timers = pick<SetTimerAction>(out);
    REQUIRE(timers.size() == 1);
    CHECK(timers[0].at == seconds_to_us(130));
    CHECK(timers[0].generation == 2);
}

TEST_CASE("hello relay tracks membership and fans the pk out") {
    LcaState lca;
    lca.cluster = 1;
    VehicleHello hello{{CertificateId{"V7"}, PublicKeyId{"pk/V7"}, "CA"},
                       PublicKeyId{"pk/V7"}};
    auto out = lca_on_hello_relay(lca, hello);
    CHECK(lca.member_vehicles.contains(CertificateId{"V7"}));
    auto bcasts = pick<BroadcastAction>(out);
    REQUIRE(bcasts.size() == 1);
    CHECK(bcasts[0].scope == Scope::LocalRsus);

    RsuState other;
    other.nccl = Nccl(5, {});
    rsu_on_hello_fanout(other, hello);
    CHECK(other.known_vehicle_pks.at(CertificateId{"V7"}).value == "pk/V7");
}

TEST_CASE("safety report flows rsu -> lca -> other rsus -> future hellos") {
    auto rsu = make_border_rsu();
    auto up = rsu_on_safety_report(rsu, SafetyReport{"ice on ramp 4"});
    REQUIRE(pick<SendAction>(up).size() == 1);
    CHECK(pick<SendAction>(up)[0].to == ActorId::lca(1));

    LcaState lca;
    lca.cluster = 1;
    auto fan = lca_on_safety(lca, SafetyReport{"ice on ramp 4"}, rsu.id);
    auto bcasts = pick<BroadcastAction>(fan);
    REQUIRE(bcasts.size() == 1);
    CHECK(bcasts[0].scope == Scope::OtherLocalRsus);
    CHECK(bcasts[0].exclude_rsu == rsu.id);
    CHECK(lca.news == std::vector<std::string>{"ice on ramp 4"});

    RsuState peer;
    peer.cluster = 1;
    peer.nccl = Nccl(3, {});
    rsu_on_safety_fanout(peer, SafetyReport{"ice on ramp 4"});
    VehicleHello hello{{CertificateId{"V7"}, PublicKeyId{"pk/V7"}, "CA"},
                       PublicKeyId{"pk/V7"}};
    auto provisioned = rsu_on_vehicle_hello(peer, hello, 0);
    auto news =
        std::get<LocalClusterNews>(pick<SendAction>(provisioned)[0].msg);
    CHECK(news.news == std::vector<std::string>{"ice on ramp 4"});
}

// --- Vehicle -------------------------------------------------------------------

TEST_CASE("crossing emits a hello to the destination guard") {
    auto v = make_vehicle("V25", 6, 1);
    auto out = vehicle_on_crossing(v, 6, 1, 2);
    REQUIRE(out.size() == 1);
    auto send = std::get<SendAction>(out[0]);
    CHECK(send.to == ActorId::rsu(2));
    auto hello = std::get<VehicleHello>(send.msg);
    CHECK(hello.cert.id.value == "V25");
    CHECK(hello.pk == v.keys.pk);
}

TEST_CASE("provisioning news adopts list, signature and cluster") {
    auto v = make_vehicle("V25", 6, 3);
    Lccl l1(1);
    l1.insert_front({CertificateId{"V11"}});
    auto out = vehicle_on_news(
        v, LocalClusterNews{{"crash at exit 2"}, l1, {1, 1},
                            PublicKeyId{"pk/RSU2"}});
    CHECK(out.empty());
    CHECK(v.current_cluster == 1);
    CHECK(v.group_sig == ClusterSignature{1, 1});
    CHECK(v.prev_group_sig == ClusterSignature{6, 3});  // kept for stale sends
    CHECK(v.lccl.contains(CertificateId{"V11"}));
    CHECK(v.news_received == std::vector<std::string>{"crash at exit 2"});
}

TEST_CASE("lccl broadcast: version gate, epoch adoption, cross-cluster drop") {
    auto v = make_vehicle("V1", 1, 1);

    Lccl l1(1);
    l1.insert_front({CertificateId{"V8"}});
    CHECK(vehicle_on_lccl_broadcast(v, LcclBroadcast{l1, 2}).empty());
    CHECK(v.lccl.contains(CertificateId{"V8"}));
    CHECK(v.group_sig->epoch == 2);  // rotation carried by the broadcast

    Lccl stale(1);
    auto dropped = vehicle_on_lccl_broadcast(v, LcclBroadcast{stale, 2});
    REQUIRE(pick<MetricAction>(dropped).size() == 1);
    CHECK(pick<MetricAction>(dropped)[0].kind == metric::kStaleLcclDropped);
    CHECK(v.lccl.contains(CertificateId{"V8"}));

    Lccl foreign(6);
    foreign.insert_front({CertificateId{"V9"}});
    auto cross = vehicle_on_lccl_broadcast(v, LcclBroadcast{foreign, 1});
    REQUIRE(pick<MetricAction>(cross).size() == 1);
    CHECK(pick<MetricAction>(cross)[0].kind ==
          metric::kCrossClusterBroadcastDropped);
    CHECK_FALSE(v.lccl.contains(CertificateId{"V9"}));
}

TEST_CASE("c2c send uses the cache or asks the rsu first") {
    auto sender = make_vehicle("V7", 1, 1);
    auto receiver = make_vehicle("V9", 1, 1);
    auto rsu_id = ActorId::rsu(2);

    // Unknown PK: request goes out and the payload is parked.
    auto out = vehicle_send_c2c(sender, receiver.cert.id, "hi", false, rsu_id);
    REQUIRE(out.size() == 1);
    CHECK(std::get<SendAction>(out[0]).to == rsu_id);
    CHECK(message_kind(std::get<SendAction>(out[0]).msg) == "PkRequest");

    // Response releases the pending message.
    auto sent = vehicle_on_pk_response(
        sender, PkResponse{receiver.cert.id, receiver.keys.pk});
    REQUIRE(sent.size() == 1);
    auto c2c = std::get<C2CMessage>(std::get<SendAction>(sent[0]).msg);
    auto got = vehicle_receive_c2c(receiver, c2c);
    CHECK(pick<AcceptAction>(got).size() == 1);
    CHECK(pick<AcceptAction>(got)[0].payload == "hi");

    // Second send hits the cache: no PkRequest.
    auto direct = vehicle_send_c2c(sender, receiver.cert.id, "again", false,
                                   rsu_id);
    REQUIRE(direct.size() == 1);
    CHECK(message_kind(std::get<SendAction>(direct[0]).msg) == "C2C");

    // Unknown target at the RSU too: the send dies quietly.
    auto nowhere =
        vehicle_send_c2c(sender, CertificateId{"V99"}, "x", false, rsu_id);
    auto gone = vehicle_on_pk_response(sender,
                                       PkResponse{CertificateId{"V99"}, {}});
    CHECK(pick<SendAction>(gone).empty());
    CHECK(pick<MetricAction>(gone).size() == 1);
    CHECK(sender.pending_c2c.empty());
}

TEST_CASE("receive pipeline rejects in decryption, signature, list order") {
    auto sender = make_vehicle("V7", 1, 1);
    auto receiver = make_vehicle("V9", 1, 1);
    sender.known_pks[receiver.cert.id] = receiver.keys.pk;

    auto send = [&](bool stale) {
        auto a = vehicle_send_c2c(sender, receiver.cert.id, "m", stale,
                                  ActorId::rsu(1));
        return std::get<C2CMessage>(std::get<SendAction>(a[0]).msg);
    };

    // Wrong recipient key.
    auto bystander = make_vehicle("V3", 1, 1);
    auto r1 = vehicle_receive_c2c(bystander, send(false));
    REQUIRE(r1.size() == 1);
    CHECK(std::get<RejectAction>(r1[0]).reason == reject::kDecryptionFailure);

    // Stale epoch: sealed before a rotation the receiver already applied.
    sender.prev_group_sig = ClusterSignature{1, 0};
    auto r2 = vehicle_receive_c2c(receiver, send(true));
    REQUIRE(r2.size() == 1);
    CHECK(std::get<RejectAction>(r2[0]).reason == reject::kBadClusterSignature);

    // Revoked sender: rejected after a promoting list lookup.
    receiver.lccl.insert_front({CertificateId{"V2"}, CertificateId{"V7"}});
    auto r3 = vehicle_receive_c2c(receiver, send(false));
    auto rejects = pick<RejectAction>(r3);
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason == reject::kRevokedSender);
    auto costs = pick<MetricAction>(r3);
    REQUIRE(costs.size() == 1);
    CHECK(costs[0].kind == metric::kLcclLookupCost);
    CHECK(costs[0].value == 2);
    CHECK(receiver.lccl.entries().front().value == "V7");  // promotion kept

    // Clean sender passes all three gates.
    auto other = make_vehicle("V4", 1, 1);
    sender.known_pks[other.cert.id] = other.keys.pk;
    auto a = vehicle_send_c2c(sender, other.cert.id, "ok", false,
                              ActorId::rsu(1));
    auto r4 = vehicle_receive_c2c(other,
                                  std::get<C2CMessage>(
                                      std::get<SendAction>(a[0]).msg));
    CHECK(pick<AcceptAction>(r4).size() == 1);
}

TEST_CASE("send without any group signature is rejected locally") {
    VehicleState v;
    v.keys = KeyPair::derive("V1");
    v.cert = {CertificateId{"V1"}, v.keys.pk, "CA"};
    v.lccl = Lccl(1);
    auto out = vehicle_send_c2c(v, CertificateId{"V2"}, "m", false,
                                ActorId::rsu(1));
    REQUIRE(out.size() == 1);
    CHECK(std::get<RejectAction>(out[0]).reason == reject::kNoGroupSignature);
}

TEST_CASE("grey grant restores operation without a border handshake") {
    auto v = make_vehicle("V1", 1, 1);
    v.current_cluster = std::nullopt;  // deep in the grey area
    Lccl l1(1);
    l1.insert_front({CertificateId{"V8"}});
    vehicle_on_grey_grant(v, GreyAreaGrant{{1, 2}, l1});
    CHECK(v.group_sig == ClusterSignature{1, 2});
    CHECK(v.lccl.contains(CertificateId{"V8"}));
}

TEST_CASE("coverage changes gate broadcast acceptance") {
    auto v = make_vehicle("V1", 1, 1);
    vehicle_on_coverage_change(v, std::nullopt);
    CHECK_FALSE(v.current_cluster.has_value());

    Lccl l1(1);
    l1.insert_front({CertificateId{"V8"}});
    auto dropped = vehicle_on_lccl_broadcast(v, LcclBroadcast{l1, 1});
    CHECK(pick<MetricAction>(dropped)[0].kind ==
          metric::kCrossClusterBroadcastDropped);

    // Back under the LCA of the cluster it still holds a signature for.
    vehicle_on_coverage_change(v, std::optional<ClusterId>{1});
    CHECK(v.current_cluster == 1);
    CHECK(vehicle_on_lccl_broadcast(v, LcclBroadcast{l1, 1}).empty());
}

TEST_CASE("signature rotation message bumps only matching, newer epochs") {
    auto v = make_vehicle("V1", 1, 1);
    vehicle_on_signature_rotation(v, SignatureRotation{6, 9});
    CHECK(v.group_sig == ClusterSignature{1, 1});
    vehicle_on_signature_rotation(v, SignatureRotation{1, 3});
    CHECK(v.group_sig == ClusterSignature{1, 3});
    CHECK(v.prev_group_sig == ClusterSignature{1, 1});
    vehicle_on_signature_rotation(v, SignatureRotation{1, 2});  // older
    CHECK(v.group_sig == ClusterSignature{1, 3});
}
