#include "crevsim/replay.hpp"

#include <algorithm>
#include <sstream>

#include "crevsim/errors.hpp"

namespace crevsim {

using nlohmann::ordered_json;

namespace {

bool is_c2c_reason(const std::string& reason) {
    return reason == reject::kDecryptionFailure ||
           reason == reject::kBadClusterSignature ||
           reason == reject::kRevokedSender;
}

struct PendingListing {
    std::string cert;
    std::string rsu;
    Time hello_us{0};
    std::uint64_t version{0};
};

}  // namespace

ReplaySummary replay_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EngineError("empty trace");
    ordered_json header;
    try {
        header = ordered_json::parse(line);
    } catch (const std::exception& e) {
        throw EngineError(std::string("bad trace header: ") + e.what());
    }
    if (header.value("trace", "") != "crevsim") {
        throw EngineError("not a trace: missing header record");
    }
    const ordered_json& config = header.at("config");

    ReplaySummary s;

    // Cluster roster and initial list state from the echoed config.
    std::vector<ClusterId> cluster_ids;
    if (config.contains("grid")) {
        const auto& grid = config.at("grid");
        cluster_ids = grid.value("cluster_ids", std::vector<ClusterId>{});
        if (cluster_ids.empty()) {
            const int n = grid.value("rows", 1) * grid.value("cols", 1);
            for (int i = 1; i <= n; ++i) cluster_ids.push_back(i);
        }
    }
    for (ClusterId c : cluster_ids) {
        s.final_entries[c] = {};
        s.versions[c] = 0;
        s.epochs[c] = 1;
    }
    if (config.contains("revoked")) {
        for (const auto& r : config.at("revoked")) {
            const ClusterId c = r.at("cluster").get<ClusterId>();
            s.final_entries[c].push_back(r.at("cert").get<std::string>());
        }
        for (auto& [c, list] : s.final_entries) {
            if (!list.empty()) s.versions[c] = 1;
        }
    }

    std::map<std::string, std::pair<Time, std::string>> pending_hello;
    std::map<ClusterId, std::vector<PendingListing>> pending_listing;

    auto tally_out = [&](const ordered_json& out) {
        for (const auto& e : out) {
            const std::string act = e.value("act", "");
            if (act == "send") {
                auto& ms = s.messages[e.at("msg").get<std::string>()];
                ++ms.count;
                ms.bytes += e.at("bytes").get<std::uint64_t>();
                if (e.value("lost", 0) != 0) ++s.losses;
            } else if (act == "bcast") {
                const auto n = e.at("recipients").get<std::uint64_t>();
                auto& ms = s.messages[e.at("msg").get<std::string>()];
                ms.count += n;
                ms.bytes += n * e.at("bytes").get<std::uint64_t>();
                s.losses += e.at("lost").get<std::uint64_t>();
            } else if (act == "accept") {
                ++s.c2c_accepted;
            } else if (act == "reject") {
                const std::string reason = e.at("reason").get<std::string>();
                if (is_c2c_reason(reason)) {
                    ++s.c2c_rejected[reason];
                } else {
                    s.metrics["Reject:" + reason] += 1;
                }
            } else if (act == "metric") {
                const std::string kind = e.at("kind").get<std::string>();
                const double value = e.at("value").get<double>();
                if (kind == metric::kLcclLookupCost) {
                    s.lookup_costs["lccl"].add(static_cast<std::uint64_t>(value));
                } else if (kind == metric::kNcclLookupCost) {
                    s.lookup_costs["nccl"].add(static_cast<std::uint64_t>(value));
                } else {
                    s.metrics[kind] += value;
                }
            }
        }
    };

    auto resolve = [&](ClusterId cluster, std::uint64_t version, Time t) {
        auto it = pending_listing.find(cluster);
        if (it == pending_listing.end()) return;
        auto& vec = it->second;
        for (auto p = vec.begin(); p != vec.end();) {
            if (p->version <= version) {
                s.detections.push_back(
                    {p->cert, p->rsu, cluster, p->hello_us, t});
                p = vec.erase(p);
            } else {
                ++p;
            }
        }
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw EngineError(std::string("bad trace record: ") + e.what());
        }
        ++s.records;
        const Time t = rec.at("t").get<Time>();
        const std::string actor = rec.at("actor").get<std::string>();
        const std::string kind = rec.at("kind").get<std::string>();
        const ordered_json& recin = rec.at("in");
        const ordered_json& out = rec.at("out");
        tally_out(out);

        const bool at_lca = actor.rfind("LCA", 0) == 0;
        const bool at_rsu = actor.rfind("RSU", 0) == 0;

        if (at_lca && kind == "AddRequest") {
            const ClusterId cluster = std::stoi(actor.substr(3));
            const auto& applied = recin.at("applied");
            if (!applied.empty()) {
                auto& list = s.final_entries[cluster];
                std::vector<std::string> fresh;
                for (const auto& c : applied) fresh.push_back(c.get<std::string>());
                list.insert(list.begin(), fresh.begin(), fresh.end());
                ++s.versions[cluster];
                for (const auto& cert : fresh) {
                    if (auto h = pending_hello.find(cert);
                        h != pending_hello.end()) {
                        pending_listing[cluster].push_back(
                            {cert, h->second.second, h->second.first,
                             s.versions[cluster]});
                        pending_hello.erase(h);
                    }
                }
            }
        } else if (at_lca && kind == "RemoveRequest") {
            if (recin.value("applied", false)) {
                const ClusterId cluster = std::stoi(actor.substr(3));
                const std::string cert = recin.at("cert").get<std::string>();
                auto& list = s.final_entries[cluster];
                list.erase(std::remove(list.begin(), list.end(), cert),
                           list.end());
                ++s.versions[cluster];
                ++s.epochs[cluster];
                bool anywhere = false;
                for (const auto& [c, l] : s.final_entries) {
                    if (std::find(l.begin(), l.end(), cert) != l.end()) {
                        anywhere = true;
                    }
                }
                if (!anywhere) ++s.zero_list_windows;
            }
        } else if (at_lca && kind == "TimerFire") {
            if (recin.value("stale", false)) ++s.stale_timer_fires;
        } else if (at_rsu &&
                   (kind == "VehicleHello" || kind == "GreyAreaRequest")) {
            for (const auto& e : out) {
                if (e.value("act", "") == "send" &&
                    e.value("msg", "") == "AddRequest") {
                    pending_hello[e.at("cert").get<std::string>()] = {t, actor};
                }
            }
        }
        if (kind == "LcclBroadcast" && !at_lca) {
            resolve(recin.at("cluster").get<ClusterId>(),
                    recin.at("version").get<std::uint64_t>(), t);
        }
    }
    return s;
}

std::vector<std::string> reconcile(const ReplaySummary& replay,
                                   const ordered_json& report) {
    std::vector<std::string> diffs;
    auto mismatch = [&](const std::string& what, const std::string& got,
                        const std::string& want) {
        diffs.push_back(what + ": trace=" + got + " report=" + want);
    };
    auto check_u64 = [&](const std::string& what, std::uint64_t got,
                         std::uint64_t want) {
        if (got != want) {
            mismatch(what, std::to_string(got), std::to_string(want));
        }
    };

    const auto& msgs = report.at("messages");
    for (const auto& [kind, ms] : replay.messages) {
        if (!msgs.contains(kind)) {
            diffs.push_back("messages." + kind + " missing from report");
            continue;
        }
        check_u64("messages." + kind + ".count", ms.count,
                  msgs.at(kind).at("count").get<std::uint64_t>());
        check_u64("messages." + kind + ".bytes", ms.bytes,
                  msgs.at(kind).at("bytes").get<std::uint64_t>());
    }
    for (const auto& [kind, v] : msgs.items()) {
        if (!replay.messages.contains(kind)) {
            diffs.push_back("messages." + kind + " missing from trace");
        }
    }
    check_u64("losses", replay.losses, report.at("losses").get<std::uint64_t>());

    check_u64("c2c.accepted", replay.c2c_accepted,
              report.at("c2c").at("accepted").get<std::uint64_t>());
    const auto& rej = report.at("c2c").at("rejected");
    for (const auto& [reason, n] : replay.c2c_rejected) {
        check_u64("c2c.rejected." + reason, n,
                  rej.contains(reason) ? rej.at(reason).get<std::uint64_t>() : 0);
    }
    for (const auto& [reason, v] : rej.items()) {
        if (!replay.c2c_rejected.contains(reason)) {
            diffs.push_back("c2c.rejected." + reason + " missing from trace");
        }
    }

    const auto& costs = report.at("lookup_costs");
    for (const auto& [name, cs] : replay.lookup_costs) {
        if (!costs.contains(name)) {
            diffs.push_back("lookup_costs." + name + " missing from report");
            continue;
        }
        check_u64("lookup_costs." + name + ".count", cs.count,
                  costs.at(name).at("count").get<std::uint64_t>());
        check_u64("lookup_costs." + name + ".total", cs.total,
                  costs.at(name).at("total").get<std::uint64_t>());
        check_u64("lookup_costs." + name + ".max", cs.max,
                  costs.at(name).at("max").get<std::uint64_t>());
    }

    const auto& metrics = report.at("metrics");
    for (const auto& [kind, v] : replay.metrics) {
        const double want =
            metrics.contains(kind) ? metrics.at(kind).get<double>() : 0.0;
        if (v != want) {
            std::ostringstream g, w;
            g << v;
            w << want;
            mismatch("metrics." + kind, g.str(), w.str());
        }
    }
    for (const auto& [kind, v] : metrics.items()) {
        if (!replay.metrics.contains(kind)) {
            diffs.push_back("metrics." + kind + " missing from trace");
        }
    }

    const auto& dets = report.at("detections");
    check_u64("detections.count", replay.detections.size(), dets.size());
    for (std::size_t i = 0;
         i < std::min<std::size_t>(replay.detections.size(), dets.size()); ++i) {
        const auto& a = replay.detections[i];
        const auto& b = dets.at(i);
        if (a.cert != b.at("cert").get<std::string>() ||
            a.rsu != b.at("rsu").get<std::string>() ||
            a.hello_us != b.at("hello_us").get<Time>() ||
            a.listed_us != b.at("listed_us").get<Time>()) {
            diffs.push_back("detections[" + std::to_string(i) + "] differs");
        }
    }

    const auto& engine = report.at("engine");
    check_u64("engine.zero_list_windows", replay.zero_list_windows,
              engine.at("zero_list_windows").get<std::uint64_t>());
    check_u64("engine.stale_timer_fires", replay.stale_timer_fires,
              engine.at("stale_timer_fires").get<std::uint64_t>());

    const auto& clusters = report.at("clusters");
    for (const auto& [id, list] : replay.final_entries) {
        const std::string key = std::to_string(id);
        if (!clusters.contains(key)) {
            diffs.push_back("clusters." + key + " missing from report");
            continue;
        }
        const auto& c = clusters.at(key);
        const auto want = c.at("final_entries").get<std::vector<std::string>>();
        if (list != want) diffs.push_back("clusters." + key + ".final_entries differ");
        check_u64("clusters." + key + ".version", replay.versions.at(id),
                  c.at("version").get<std::uint64_t>());
        check_u64("clusters." + key + ".epoch", replay.epochs.at(id),
                  c.at("epoch").get<std::uint64_t>());
    }
    return diffs;
}

}  // namespace crevsim
