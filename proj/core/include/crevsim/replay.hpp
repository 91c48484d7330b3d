#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crevsim/engine.hpp"

namespace crevsim {

/// Counters recomputed from a trace alone, without touching the engine.
/// A run's report must reconcile with the replay of its own trace.
struct ReplaySummary {
    std::map<std::string, RunStats::MsgStat> messages;
    std::uint64_t losses{0};
    std::uint64_t c2c_accepted{0};
    std::map<std::string, std::uint64_t> c2c_rejected;
    std::map<std::string, double> metrics;
    std::map<std::string, RunStats::CostStat> lookup_costs;

    struct Detection {
        std::string cert;
        std::string rsu;
        ClusterId cluster{0};
        Time hello_us{0};
        Time listed_us{0};
    };
    std::vector<Detection> detections;

    std::uint64_t zero_list_windows{0};
    std::uint64_t stale_timer_fires{0};

    std::map<ClusterId, std::vector<std::string>> final_entries;
    std::map<ClusterId, std::uint64_t> versions;
    std::map<ClusterId, std::uint64_t> epochs;

    std::uint64_t records{0};  // applied-event lines
};

/// Re-derive the summary from an ndjson trace (header line first). Throws
/// EngineError on malformed input.
ReplaySummary replay_trace(std::istream& in);

/// Field-by-field comparison against a run report (its to_json() form).
/// Returns human-readable mismatch descriptions; empty means reconciled.
std::vector<std::string> reconcile(const ReplaySummary& replay,
                                   const nlohmann::ordered_json& report_json);

}  // namespace crevsim
