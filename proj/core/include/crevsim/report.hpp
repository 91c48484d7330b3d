#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crevsim/engine.hpp"

namespace crevsim {

struct ClusterReport {
    std::vector<std::string> final_entries;  // front to back
    std::uint64_t version{0};
    std::uint64_t epoch{0};
    std::uint64_t max_bytes{0};
    std::vector<RunStats::LcclSample> series;
};

struct BaselineReport {
    std::uint64_t entries{0};
    std::uint64_t workload_entries{0};  // excluding seeded filler
    std::uint64_t bytes{0};
    double distribution_s{0};
    std::uint64_t worst_lookup_cost{0};
    std::uint64_t max_lccl_bytes{0};
    double lccl_distribution_s{0};
    double byte_ratio{0};  // crl bytes / max lccl bytes
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed{0};
    RunStats stats;
    std::map<ClusterId, ClusterReport> clusters;
    BaselineReport baseline;
    double broadcast_delivery_s{0};  // channel latency for one LCCL broadcast

    nlohmann::ordered_json to_json() const;
};

/// Fixed-width human summary: max LCCL bytes vs CRL bytes, byte ratio,
/// detection latencies, distribution times.
std::string comparison_table(const RunReport& report);

/// report.json plus a flat report.csv (path,value per row, identical
/// numbers to the JSON) under `dir`. Throws EngineError when unwritable.
void emit_report(const RunReport& report, const std::string& dir);

/// The flat csv rows, derived from the JSON (shared by emit and tests).
std::vector<std::pair<std::string, std::string>> flatten_report(
    const nlohmann::ordered_json& report_json);

}  // namespace crevsim
