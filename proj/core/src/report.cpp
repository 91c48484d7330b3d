#include "crevsim/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "crevsim/errors.hpp"

namespace crevsim {

using nlohmann::ordered_json;

ordered_json RunReport::to_json() const {
    ordered_json j;
    j["schema"] = 1;
    j["scenario"] = scenario;
    j["seed"] = seed;

    ordered_json messages;
    for (const auto& [kind, ms] : stats.messages) {
        messages[kind] = {{"count", ms.count}, {"bytes", ms.bytes}};
    }
    j["messages"] = std::move(messages);
    j["losses"] = stats.losses;

    ordered_json rejected;
    for (const auto& [reason, n] : stats.c2c_rejected) rejected[reason] = n;
    j["c2c"] = {{"accepted", stats.c2c_accepted}, {"rejected", std::move(rejected)}};

    ordered_json costs;
    for (const auto& [name, cs] : stats.lookup_costs) {
        costs[name] = {{"count", cs.count}, {"total", cs.total}, {"max", cs.max}};
    }
    j["lookup_costs"] = std::move(costs);

    ordered_json metrics;
    for (const auto& [kind, v] : stats.metrics) metrics[kind] = v;
    j["metrics"] = std::move(metrics);

    ordered_json detections = ordered_json::array();
    for (const auto& d : stats.detections) {
        detections.push_back({{"cert", d.cert},
                              {"rsu", "RSU" + std::to_string(d.rsu)},
                              {"cluster", d.cluster},
                              {"hello_us", d.hello_us},
                              {"listed_us", d.listed_us},
                              {"latency_us", d.listed_us - d.hello_us}});
    }
    j["detections"] = std::move(detections);

    ordered_json crossings = ordered_json::array();
    for (const auto& c : stats.crossings) {
        crossings.push_back({{"vehicle", c.vehicle},
                             {"t_us", c.at},
                             {"from", c.from},
                             {"to", c.to},
                             {"rsu", "RSU" + std::to_string(c.rsu)},
                             {"adversary", c.adversary},
                             {"add_emitted", c.add_emitted}});
    }
    j["crossings"] = std::move(crossings);

    ordered_json clustersj;
    for (const auto& [id, c] : clusters) {
        ordered_json series = ordered_json::array();
        for (const auto& s : c.series) {
            series.push_back(
                {{"t_us", s.t}, {"entries", s.entries}, {"bytes", s.bytes}});
        }
        clustersj[std::to_string(id)] = {{"final_entries", c.final_entries},
                                         {"version", c.version},
                                         {"epoch", c.epoch},
                                         {"max_bytes", c.max_bytes},
                                         {"series", std::move(series)}};
    }
    j["clusters"] = std::move(clustersj);

    j["engine"] = {{"zero_list_windows", stats.zero_list_windows},
                   {"stale_timer_fires", stats.stale_timer_fires}};

    j["baseline"] = {{"entries", baseline.entries},
                     {"workload_entries", baseline.workload_entries},
                     {"bytes", baseline.bytes},
                     {"distribution_s", baseline.distribution_s},
                     {"worst_lookup_cost", baseline.worst_lookup_cost},
                     {"max_lccl_bytes", baseline.max_lccl_bytes},
                     {"lccl_distribution_s", baseline.lccl_distribution_s},
                     {"byte_ratio", baseline.byte_ratio}};
    j["broadcast_delivery_s"] = broadcast_delivery_s;
    return j;
}

std::string comparison_table(const RunReport& report) {
    std::ostringstream os;
    os << std::left;
    auto row = [&](const std::string& k, const std::string& v) {
        os << "  " << std::setw(34) << k << v << "\n";
    };
    os << "=== cluster protocol vs global CRL (" << report.scenario << ") ===\n";
    row("max LCCL size [bytes]", std::to_string(report.baseline.max_lccl_bytes));
    row("global CRL size [bytes]", std::to_string(report.baseline.bytes));
    {
        std::ostringstream v;
        v << std::fixed << std::setprecision(1) << report.baseline.byte_ratio << "x";
        row("CRL / LCCL byte ratio", v.str());
    }
    {
        std::ostringstream v;
        v << std::fixed << std::setprecision(3) << report.baseline.distribution_s
          << " s";
        row("CRL distribution time", v.str());
    }
    {
        std::ostringstream v;
        v << std::fixed << std::setprecision(3)
          << report.baseline.lccl_distribution_s << " s";
        row("LCCL distribution time", v.str());
    }
    {
        std::ostringstream v;
        v << std::fixed << std::setprecision(3) << report.broadcast_delivery_s
          << " s";
        row("LCCL broadcast delivery", v.str());
    }
    if (report.stats.detections.empty()) {
        row("adversary detections", "none");
    } else {
        Time max_lat = 0, sum = 0;
        for (const auto& d : report.stats.detections) {
            Time lat = d.listed_us - d.hello_us;
            max_lat = std::max(max_lat, lat);
            sum += lat;
        }
        row("adversary detections", std::to_string(report.stats.detections.size()));
        std::ostringstream v;
        v << std::fixed << std::setprecision(3)
          << us_to_seconds(sum / report.stats.detections.size()) << " s (max "
          << us_to_seconds(max_lat) << " s)";
        row("detection latency mean", v.str());
    }
    return os.str();
}

std::vector<std::pair<std::string, std::string>> flatten_report(
    const ordered_json& report_json) {
    std::vector<std::pair<std::string, std::string>> rows;
    const ordered_json flat = report_json.flatten();
    for (const auto& [path, value] : flat.items()) {
        rows.emplace_back(path, value.dump());
    }
    return rows;
}

void emit_report(const RunReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const ordered_json j = report.to_json();
    {
        std::ofstream f(dir + "/report.json");
        if (!f) throw EngineError("cannot write " + dir + "/report.json");
        f << j.dump(2) << "\n";
    }
    {
        std::ofstream f(dir + "/report.csv");
        if (!f) throw EngineError("cannot write " + dir + "/report.csv");
        f << "path,value\n";
        for (const auto& [path, value] : flatten_report(j)) {
            f << path << "," << value << "\n";
        }
    }
    {
        std::ofstream f(dir + "/comparison.txt");
        if (!f) throw EngineError("cannot write " + dir + "/comparison.txt");
        f << comparison_table(report);
    }
}

}  // namespace crevsim
