#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crevsim/baseline.hpp"
#include "crevsim/ids.hpp"
#include "crevsim/mobility.hpp"

namespace crevsim {

struct VehicleSpec {
    CertificateId id;
    bool adversary{false};
    VehicleItinerary itinerary;
};

struct InitialRevocation {
    CertificateId cert;
    ClusterId cluster{0};
};

/// Full run configuration. File order of vehicles and revocations is
/// preserved: it fixes initial list order and breaks same-instant
/// scheduling ties.
struct ScenarioConfig {
    std::string name{"scenario"};

    int rows{1};
    int cols{1};
    double side_m{2000};
    int rsus_per_border{1};
    int interior_rsus{0};
    std::vector<ClusterId> cluster_ids;  // optional row-major remap

    double broadcast_period_s{60};
    std::size_t entry_size_bytes{100};
    std::size_t header_bytes{16};
    double speed_limit_mps{14};

    double latency_vehicle_rsu_ms{2};
    double latency_rsu_lca_ms{5};
    double latency_broadcast_ms{10};
    double jitter_ms{0};
    double loss{0};

    std::uint64_t seed{0};
    bool seed_set{false};
    double t_end_s{600};

    DistributionModel baseline_model;
    std::size_t baseline_seed_entries{0};

    std::map<std::string, std::size_t> msg_size_overrides;

    std::vector<VehicleSpec> vehicles;
    std::vector<InitialRevocation> revoked;
};

/// Parse the scenario text format. Throws ScenarioError with
/// "<name>:<line>: ..." on malformed input.
ScenarioConfig parse_scenario(std::istream& in, const std::string& name);

/// Load + parse + validate.
ScenarioConfig load_scenario(const std::string& path);

/// Cross-reference and bounds checks (throws ScenarioError):
/// mandatory seed, rostered revocations, in-bounds strictly-increasing
/// waypoints, speed limit, known event targets.
void validate_scenario(const ScenarioConfig& cfg);

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);

}  // namespace crevsim
