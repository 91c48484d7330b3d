#include "crevsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crevsim/errors.hpp"
#include "crevsim/topology.hpp"

namespace crevsim {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

struct LineCtx {
    const std::string& file;
    int lineno;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ScenarioError(file + ":" + std::to_string(lineno) + ": " + msg);
    }
};

// "key=value" -> {key, value}
std::pair<std::string, std::string> split_kv(const std::string& tok,
                                             const LineCtx& ctx) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) ctx.fail("expected key=value, got '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

double to_double(const std::string& s, const LineCtx& ctx) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        ctx.fail("not a number: '" + s + "'");
    }
}

long long to_int(const std::string& s, const LineCtx& ctx) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        ctx.fail("not an integer: '" + s + "'");
    }
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    std::string line;
    int lineno = 0;
    auto find_vehicle = [&](const std::string& id,
                            const LineCtx& ctx) -> VehicleSpec& {
        for (auto& v : cfg.vehicles) {
            if (v.id.value == id) return v;
        }
        ctx.fail("unknown vehicle '" + id + "' (declare it first)");
    };

    while (std::getline(in, line)) {
        ++lineno;
        LineCtx ctx{name, lineno};
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];

        if (head == "name") {
            if (toks.size() != 2) ctx.fail("usage: name <word>");
            cfg.name = toks[1];
        } else if (head == "grid") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], ctx);
                if (k == "rows") cfg.rows = static_cast<int>(to_int(v, ctx));
                else if (k == "cols") cfg.cols = static_cast<int>(to_int(v, ctx));
                else if (k == "side_m") cfg.side_m = to_double(v, ctx);
                else if (k == "rsus_per_border")
                    cfg.rsus_per_border = static_cast<int>(to_int(v, ctx));
                else if (k == "interior_rsus")
                    cfg.interior_rsus = static_cast<int>(to_int(v, ctx));
                else ctx.fail("unknown grid field '" + k + "'");
            }
        } else if (head == "cluster_ids") {
            cfg.cluster_ids.clear();
            for (std::size_t i = 1; i < toks.size(); ++i) {
                cfg.cluster_ids.push_back(
                    static_cast<ClusterId>(to_int(toks[i], ctx)));
            }
        } else if (head == "broadcast_period_s") {
            if (toks.size() != 2) ctx.fail("usage: broadcast_period_s <s>");
            cfg.broadcast_period_s = to_double(toks[1], ctx);
        } else if (head == "entry_size_bytes") {
            cfg.entry_size_bytes = static_cast<std::size_t>(to_int(toks.at(1), ctx));
        } else if (head == "header_bytes") {
            cfg.header_bytes = static_cast<std::size_t>(to_int(toks.at(1), ctx));
        } else if (head == "speed_limit_mps") {
            cfg.speed_limit_mps = to_double(toks.at(1), ctx);
        } else if (head == "latency_ms") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], ctx);
                if (k == "vehicle_rsu") cfg.latency_vehicle_rsu_ms = to_double(v, ctx);
                else if (k == "rsu_lca") cfg.latency_rsu_lca_ms = to_double(v, ctx);
                else if (k == "broadcast") cfg.latency_broadcast_ms = to_double(v, ctx);
                else ctx.fail("unknown latency field '" + k + "'");
            }
        } else if (head == "jitter_ms") {
            cfg.jitter_ms = to_double(toks.at(1), ctx);
        } else if (head == "loss") {
            cfg.loss = to_double(toks.at(1), ctx);
        } else if (head == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_int(toks.at(1), ctx));
            cfg.seed_set = true;
        } else if (head == "t_end_s") {
            cfg.t_end_s = to_double(toks.at(1), ctx);
        } else if (head == "baseline") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], ctx);
                if (k == "bandwidth_bps")
                    cfg.baseline_model.effective_bandwidth_bytes_per_s =
                        to_double(v, ctx);
                else if (k == "overhead_s")
                    cfg.baseline_model.per_message_overhead_s = to_double(v, ctx);
                else if (k == "seed_entries")
                    cfg.baseline_seed_entries =
                        static_cast<std::size_t>(to_int(v, ctx));
                else ctx.fail("unknown baseline field '" + k + "'");
            }
        } else if (head == "msg_size") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], ctx);
                cfg.msg_size_overrides[k] =
                    static_cast<std::size_t>(to_int(v, ctx));
            }
        } else if (head == "vehicle") {
            if (toks.size() < 2) ctx.fail("usage: vehicle <id> [adversary]");
            VehicleSpec spec;
            spec.id = CertificateId{toks[1]};
            spec.itinerary.vehicle = spec.id;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                if (toks[i] == "adversary") spec.adversary = true;
                else ctx.fail("unknown vehicle flag '" + toks[i] + "'");
            }
            for (const auto& v : cfg.vehicles) {
                if (v.id == spec.id) ctx.fail("duplicate vehicle '" + toks[1] + "'");
            }
            cfg.vehicles.push_back(std::move(spec));
        } else if (head == "waypoint") {
            if (toks.size() != 5) ctx.fail("usage: waypoint <vid> <t_s> <x_m> <y_m>");
            auto& v = find_vehicle(toks[1], ctx);
            v.itinerary.waypoints.push_back(
                {to_double(toks[2], ctx),
                 {to_double(toks[3], ctx), to_double(toks[4], ctx)}});
        } else if (head == "event") {
            if (toks.size() < 4) ctx.fail("usage: event <vid> <t_s> <kind> ...");
            auto& v = find_vehicle(toks[1], ctx);
            ScriptedEvent ev;
            ev.t_s = to_double(toks[2], ctx);
            const std::string& ekind = toks[3];
            if (ekind == "send_c2c") ev.kind = ScriptedEvent::Kind::SendC2C;
            else if (ekind == "report_safety") ev.kind = ScriptedEvent::Kind::ReportSafety;
            else if (ekind == "grey_request") ev.kind = ScriptedEvent::Kind::GreyRequest;
            else ctx.fail("unknown event kind '" + ekind + "'");
            for (std::size_t i = 4; i < toks.size(); ++i) {
                auto [k, val] = split_kv(toks[i], ctx);
                if (k == "target") ev.target = CertificateId{val};
                else if (k == "payload" || k == "body") ev.payload = val;
                else if (k == "stale") ev.use_stale = to_int(val, ctx) != 0;
                else if (k == "cluster")
                    ev.cluster = static_cast<ClusterId>(to_int(val, ctx));
                else ctx.fail("unknown event field '" + k + "'");
            }
            v.itinerary.events.push_back(std::move(ev));
        } else if (head == "revoked") {
            if (toks.size() != 3) ctx.fail("usage: revoked <cert> cluster=<id>");
            auto [k, val] = split_kv(toks[2], ctx);
            if (k != "cluster") ctx.fail("usage: revoked <cert> cluster=<id>");
            cfg.revoked.push_back(
                {CertificateId{toks[1]},
                 static_cast<ClusterId>(to_int(val, ctx))});
        } else {
            ctx.fail("unknown directive '" + head + "'");
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::string name = path;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    ScenarioConfig cfg = parse_scenario(in, name);
    validate_scenario(cfg);
    return cfg;
}

void validate_scenario(const ScenarioConfig& cfg) {
    auto fail = [&](const std::string& msg) {
        throw ScenarioError(cfg.name + ": " + msg);
    };
    if (!cfg.seed_set) fail("seed is mandatory");
    if (cfg.rows < 1 || cfg.cols < 1) fail("grid: dimensions must be positive");
    if (cfg.side_m <= 0) fail("grid.side_m: must be positive");
    if (cfg.entry_size_bytes == 0) fail("entry_size_bytes: must be positive");
    if (cfg.broadcast_period_s <= 0) fail("broadcast_period_s: must be positive");
    if (cfg.t_end_s <= 0) fail("t_end_s: must be positive");
    if (cfg.loss < 0 || cfg.loss > 1) fail("loss: must be in [0,1]");

    ClusterGrid grid;
    try {
        grid = ClusterGrid::build(cfg.rows, cfg.cols, cfg.side_m,
                                  cfg.rsus_per_border, cfg.interior_rsus,
                                  cfg.cluster_ids);
    } catch (const TopologyError& e) {
        fail(std::string("grid: ") + e.what());
    }

    auto rostered = [&](const CertificateId& id) {
        return std::any_of(cfg.vehicles.begin(), cfg.vehicles.end(),
                           [&](const VehicleSpec& v) { return v.id == id; });
    };
    for (const auto& rev : cfg.revoked) {
        if (!rostered(rev.cert)) {
            fail("revoked: unknown vehicle '" + rev.cert.value +
                 "' in initial LCCL");
        }
        if (!grid.clusters().contains(rev.cluster)) {
            fail("revoked " + rev.cert.value + ": unknown cluster " +
                 std::to_string(rev.cluster));
        }
    }

    for (const auto& v : cfg.vehicles) {
        const std::string who = "vehicle " + v.id.value;
        if (v.id.value.empty()) fail("vehicle: empty id");
        if (v.itinerary.waypoints.empty()) fail(who + ": needs a waypoint");
        const auto& wps = v.itinerary.waypoints;
        for (std::size_t i = 0; i < wps.size(); ++i) {
            if (!grid.in_bounds(wps[i].pos)) {
                fail(who + ": waypoint " + std::to_string(i) +
                     " outside the grid");
            }
            if (i > 0) {
                double dt = wps[i].t_s - wps[i - 1].t_s;
                if (dt <= 0) fail(who + ": waypoint times must strictly increase");
                double d = std::hypot(wps[i].pos.x - wps[i - 1].pos.x,
                                      wps[i].pos.y - wps[i - 1].pos.y);
                if (d / dt > cfg.speed_limit_mps + 1e-9) {
                    fail(who + ": segment " + std::to_string(i) +
                         " exceeds the speed limit");
                }
            }
        }
        for (const auto& ev : v.itinerary.events) {
            if (ev.kind == ScriptedEvent::Kind::SendC2C && !rostered(ev.target)) {
                fail(who + ": send_c2c target '" + ev.target.value +
                     "' is not rostered");
            }
            if (ev.kind == ScriptedEvent::Kind::GreyRequest &&
                !grid.clusters().contains(ev.cluster)) {
                fail(who + ": grey_request names unknown cluster");
            }
        }
    }
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["name"] = cfg.name;
    j["grid"] = {{"rows", cfg.rows},
                 {"cols", cfg.cols},
                 {"side_m", cfg.side_m},
                 {"rsus_per_border", cfg.rsus_per_border},
                 {"interior_rsus", cfg.interior_rsus},
                 {"cluster_ids", cfg.cluster_ids}};
    j["broadcast_period_s"] = cfg.broadcast_period_s;
    j["entry_size_bytes"] = cfg.entry_size_bytes;
    j["header_bytes"] = cfg.header_bytes;
    j["speed_limit_mps"] = cfg.speed_limit_mps;
    j["latency_ms"] = {{"vehicle_rsu", cfg.latency_vehicle_rsu_ms},
                       {"rsu_lca", cfg.latency_rsu_lca_ms},
                       {"broadcast", cfg.latency_broadcast_ms}};
    j["jitter_ms"] = cfg.jitter_ms;
    j["loss"] = cfg.loss;
    j["seed"] = cfg.seed;
    j["t_end_s"] = cfg.t_end_s;
    j["baseline"] = {
        {"bandwidth_bps", cfg.baseline_model.effective_bandwidth_bytes_per_s},
        {"overhead_s", cfg.baseline_model.per_message_overhead_s},
        {"seed_entries", cfg.baseline_seed_entries}};
    ordered_json vehicles = ordered_json::array();
    for (const auto& v : cfg.vehicles) {
        ordered_json vj;
        vj["id"] = v.id.value;
        vj["adversary"] = v.adversary;
        ordered_json wps = ordered_json::array();
        for (const auto& wp : v.itinerary.waypoints) {
            wps.push_back({wp.t_s, wp.pos.x, wp.pos.y});
        }
        vj["waypoints"] = std::move(wps);
        vj["events"] = v.itinerary.events.size();
        vehicles.push_back(std::move(vj));
    }
    j["vehicles"] = std::move(vehicles);
    ordered_json revoked = ordered_json::array();
    for (const auto& r : cfg.revoked) {
        revoked.push_back({{"cert", r.cert.value}, {"cluster", r.cluster}});
    }
    j["revoked"] = std::move(revoked);
    return j;
}

}  // namespace crevsim
