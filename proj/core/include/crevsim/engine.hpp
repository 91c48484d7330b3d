#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crevsim/actors.hpp"
#include "crevsim/baseline.hpp"
#include "crevsim/ids.hpp"
#include "crevsim/messages.hpp"
#include "crevsim/mobility.hpp"
#include "crevsim/topology.hpp"

namespace crevsim {

struct TimerFire {
    ClusterId cluster{0};
    std::uint64_t generation{0};
};

using EventPayload = std::variant<ProtocolMessage, TimerFire, BorderCrossing,
                                  EnterGreyArea, LeaveGreyArea, ScriptedAction>;

// Delivery priority classes. Total event order is (at, priority, seq);
// Add deliveries outrank Remove deliveries at the same instant.
enum EventPriority : int {
    kPriorityAdd = 0,
    kPriorityRemove = 1,
    kPriorityDelivery = 2,
    kPriorityTimer = 3,
};

struct Event {
    Time at{0};
    int priority{kPriorityDelivery};
    std::uint64_t seq{0};
    ActorId target;
    ActorId source;
    EventPayload payload;
};

enum class LinkClass { VehicleRsu, RsuLca, Broadcast };

struct ChannelModel {
    Time latency_vehicle_rsu{2000};  // microseconds
    Time latency_rsu_lca{5000};
    Time latency_broadcast{10000};
    Time jitter_max{0};
    double loss_prob{0};

    std::mt19937_64 rng{0};
    std::uint64_t draws{0};

    Time base_latency(LinkClass lc) const;
    Time draw_latency(LinkClass lc);
    bool draw_loss();
};

struct RunStats {
    struct MsgStat {
        std::uint64_t count{0};
        std::uint64_t bytes{0};
    };
    struct CostStat {
        std::uint64_t count{0};
        std::uint64_t total{0};
        std::uint64_t max{0};
        void add(std::uint64_t c) {
            ++count;
            total += c;
            max = std::max(max, c);
        }
    };
    struct Detection {
        std::string cert;
        RsuId rsu{0};
        ClusterId cluster{0};
        Time hello_us{0};
        Time listed_us{0};
    };
    struct Crossing {
        std::string vehicle;
        Time at{0};
        ClusterId from{0};
        ClusterId to{0};
        RsuId rsu{0};
        bool adversary{false};
        bool add_emitted{false};
    };
    struct LcclSample {
        Time t{0};
        std::uint64_t entries{0};
        std::uint64_t bytes{0};
    };

    std::map<std::string, MsgStat> messages;  // emissions, keyed by kind
    std::uint64_t losses{0};
    std::uint64_t c2c_accepted{0};
    std::map<std::string, std::uint64_t> c2c_rejected;  // by reason
    std::map<std::string, double> metrics;
    std::map<std::string, CostStat> lookup_costs;  // "lccl", "nccl"
    std::vector<Detection> detections;
    std::vector<Crossing> crossings;
    std::map<ClusterId, std::vector<LcclSample>> lccl_series;
    std::uint64_t zero_list_windows{0};
    std::uint64_t stale_timer_fires{0};
};

/// The whole simulated system: grid, actor states, the event queue, the
/// channel model, and the CRL baseline fed by the same revocation stream.
/// Strictly single-threaded per run.
class World {
public:
    ClusterGrid grid;
    std::map<ClusterId, LcaState> lcas;
    std::map<RsuId, RsuState> rsus;
    std::map<CertificateId, VehicleState> vehicles;
    ChannelModel channel;
    MessageSizing sizing;
    GlobalCrl crl;
    RunStats stats;
    std::ostream* trace{nullptr};  // ndjson, one record per applied event

    Time now() const { return clock_; }

    /// Throws EngineError when scheduling in the past.
    void schedule(Time at, ActorId target, ActorId source, EventPayload payload);

    void schedule_initial_timers();

    /// Pop and apply events in total order until the queue is empty or the
    /// next event lies past t_end. When drain_deliveries is set, in-flight
    /// deliveries past t_end are still applied (timers are discarded) so a
    /// run ends quiescent.
    void run_until(Time t_end, bool drain_deliveries = true);

    bool has_pending_deliveries() const;

private:
    struct EventCmp {
        bool operator()(const Event& a, const Event& b) const {
            return std::tie(a.at, a.priority, a.seq) <
                   std::tie(b.at, b.priority, b.seq);
        }
    };
    std::set<Event, EventCmp> queue_;
    std::uint64_t next_seq_{1};
    Time clock_{0};

    // Detection bookkeeping: hello time per cert awaiting an Add, then the
    // LCCL version that first lists it, resolved at first broadcast delivery.
    struct PendingListing {
        std::string cert;
        RsuId rsu{0};
        Time hello_us{0};
        std::uint64_t version{0};
    };
    std::map<CertificateId, std::pair<Time, RsuId>> pending_hello_;
    std::map<ClusterId, std::vector<PendingListing>> pending_listing_;

    void apply_one();
    void apply_lca_add_batch(const std::vector<Event>& batch);
    void apply_event(const Event& ev);
    void dispatch_actions(const ActorId& self, const Actions& actions,
                          nlohmann::ordered_json& out);
    std::vector<ActorId> resolve_scope(const ActorId& self,
                                       const BroadcastAction& b) const;
    void record(const ActorId& actor, const std::string& kind,
                nlohmann::ordered_json in, nlohmann::ordered_json out,
                std::uint64_t state_version);
    LinkClass link_class(const ActorId& from, const ActorId& to) const;
    std::uint64_t actor_state_version(const ActorId& id) const;
};

// Header record writer (seed + config echo), used by the runner before any
// event record.
void write_trace_header(std::ostream& os, const nlohmann::ordered_json& config);

}  // namespace crevsim
