#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "crevsim/errors.hpp"
#include "crevsim/replay.hpp"
#include "crevsim/report.hpp"
#include "crevsim/runner.hpp"

namespace fs = std::filesystem;
using namespace crevsim;

namespace {

struct RunOpts {
    std::string scenario_path;
    std::uint64_t seed{0};
    bool seed_set{false};
    double t_end{0};
    bool t_end_set{false};
    std::string out_dir;
    bool want_trace{false};
    std::string format;
};

int do_run(const RunOpts& opts) {
    ScenarioConfig cfg = load_scenario(opts.scenario_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.t_end_set) {
        if (opts.t_end <= 0) throw ScenarioError("--t-end must be positive");
        cfg.t_end_s = opts.t_end;
    }

    std::ostringstream trace;
    RunReport report = run_scenario(cfg, opts.want_trace ? &trace : nullptr);

    if (!opts.out_dir.empty()) {
        emit_report(report, opts.out_dir);
        if (opts.want_trace) {
            const std::string path = opts.out_dir + "/trace.ndjson";
            std::ofstream f(path);
            if (!f) throw EngineError("cannot write " + path);
            f << trace.str();
        }
    } else if (opts.want_trace) {
        const std::string path = cfg.name + ".trace.ndjson";
        std::ofstream f(path);
        if (!f) throw EngineError("cannot write " + path);
        f << trace.str();
    }

    if (opts.format == "json") {
        std::cout << report.to_json().dump(2) << "\n";
    } else if (opts.format == "csv") {
        std::cout << "path,value\n";
        for (const auto& [path, value] : flatten_report(report.to_json())) {
            std::cout << path << "," << value << "\n";
        }
    } else {
        std::cout << comparison_table(report);
    }
    return 0;
}

int do_sweep(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".scn") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "sweep: no .scn files in " << dir << "\n";
        return 2;
    }

    struct Outcome {
        std::string name;
        std::string line;
        bool ok;
    };
    std::vector<std::future<Outcome>> runs;
    for (const auto& f : files) {
        runs.push_back(std::async(std::launch::async, [f]() -> Outcome {
            try {
                ScenarioConfig cfg = load_scenario(f.string());
                RunReport r = run_scenario(cfg);
                std::ostringstream os;
                os << cfg.name << ": ok, " << r.stats.detections.size()
                   << " detections, " << r.stats.crossings.size()
                   << " crossings";
                return {cfg.name, os.str(), true};
            } catch (const std::exception& e) {
                return {f.stem().string(),
                        f.stem().string() + ": FAILED: " + e.what(), false};
            }
        }));
    }
    bool all_ok = true;
    for (auto& r : runs) {
        Outcome o = r.get();
        std::cout << o.line << "\n";
        all_ok = all_ok && o.ok;
    }
    return all_ok ? 0 : 1;
}

int do_replay(const std::string& trace_path, const std::string& report_path) {
    std::ifstream in(trace_path);
    if (!in) throw ScenarioError("cannot open trace: " + trace_path);
    ReplaySummary s = replay_trace(in);

    std::cout << "records: " << s.records << "\n";
    std::uint64_t msg_count = 0, msg_bytes = 0;
    for (const auto& [kind, ms] : s.messages) {
        msg_count += ms.count;
        msg_bytes += ms.bytes;
    }
    std::cout << "messages: " << msg_count << " (" << msg_bytes << " bytes), "
              << s.losses << " lost\n";
    std::cout << "c2c: " << s.c2c_accepted << " accepted";
    for (const auto& [reason, n] : s.c2c_rejected) {
        std::cout << ", " << n << " " << reason;
    }
    std::cout << "\n";
    std::cout << "detections: " << s.detections.size() << "\n";

    if (report_path.empty()) return 0;
    std::ifstream rf(report_path);
    if (!rf) throw ScenarioError("cannot open report: " + report_path);
    nlohmann::ordered_json report = nlohmann::ordered_json::parse(rf);
    auto diffs = reconcile(s, report);
    if (diffs.empty()) {
        std::cout << "reconciled: trace and report agree\n";
        return 0;
    }
    for (const auto& d : diffs) std::cerr << "mismatch: " << d << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster-scoped certificate revocation simulator"};
    app.require_subcommand(1);

    RunOpts ropts;
    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("scenario", ropts.scenario_path, "scenario file")
        ->required();
    auto* seed_opt = run->add_option("--seed", ropts.seed, "override the seed");
    auto* tend_opt =
        run->add_option("--t-end", ropts.t_end, "override t_end (seconds)");
    run->add_option("--out", ropts.out_dir, "write report files to DIR");
    run->add_flag("--trace", ropts.want_trace, "write the ndjson event trace");
    run->add_option("--format", ropts.format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "run every .scn in a directory");
    sweep->add_option("dir", sweep_dir, "scenario directory")->required();

    std::string trace_path, report_path;
    auto* replay = app.add_subcommand("replay", "recount a trace");
    replay->add_option("trace", trace_path, "ndjson trace file")->required();
    replay->add_option("--report", report_path,
                       "report.json to reconcile against");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            ropts.seed_set = seed_opt->count() > 0;
            ropts.t_end_set = tend_opt->count() > 0;
            return do_run(ropts);
        }
        if (sweep->parsed()) return do_sweep(sweep_dir);
        if (replay->parsed()) return do_replay(trace_path, report_path);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
