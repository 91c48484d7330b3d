#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "crevsim/baseline.hpp"
#include "crevsim/lists.hpp"
#include "crevsim/runner.hpp"
#include "crevsim/scenario_gen.hpp"

using namespace crevsim;

namespace {

Lccl make_lccl(std::size_t n) {
    Lccl l(1);
    std::vector<CertificateId> certs;
    certs.reserve(n);
    // insert_front reverses batch order relative to append; build back to
    // front so C0 ends up frontmost.
    for (std::size_t i = n; i-- > 0;) {
        certs.push_back(CertificateId{"C" + std::to_string(i)});
    }
    for (const auto& c : certs) {
        const CertificateId one[]{c};
        l.insert_front(one);
    }
    return l;
}

GlobalCrl make_crl(std::size_t n) {
    GlobalCrl crl;
    for (std::size_t i = 0; i < n; ++i) {
        crl.revoke(CertificateId{"C" + std::to_string(i)});
    }
    return crl;
}

}  // namespace

// Repeat lookups of one hot cert: move-to-front makes the second and later
// scans O(1) regardless of list length.
static void BM_LcclHotLookup(benchmark::State& state) {
    auto l = make_lccl(static_cast<std::size_t>(state.range(0)));
    const CertificateId hot{"C" + std::to_string(state.range(0) - 1)};
    l.lookup_promote(hot);  // pay the first scan outside the loop
    for (auto _ : state) {
        benchmark::DoNotOptimize(l.lookup_promote(hot));
    }
}
BENCHMARK(BM_LcclHotLookup)->Arg(100)->Arg(1000)->Arg(25000);

// The same hot-cert workload against the flat CRL: every lookup rescans.
static void BM_CrlHotLookup(benchmark::State& state) {
    const auto crl = make_crl(static_cast<std::size_t>(state.range(0)));
    const CertificateId hot{"C" + std::to_string(state.range(0) - 1)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(crl.lookup(hot));
    }
}
BENCHMARK(BM_CrlHotLookup)->Arg(100)->Arg(1000)->Arg(25000);

// Batch prepend cost for a border-crossing wave.
static void BM_LcclBatchInsert(benchmark::State& state) {
    std::vector<CertificateId> batch;
    for (int i = 0; i < state.range(0); ++i) {
        batch.push_back(CertificateId{"N" + std::to_string(i)});
    }
    for (auto _ : state) {
        state.PauseTiming();
        auto l = make_lccl(1000);
        state.ResumeTiming();
        benchmark::DoNotOptimize(l.insert_front(batch));
    }
}
BENCHMARK(BM_LcclBatchInsert)->Arg(1)->Arg(10)->Arg(100);

// Whole-pipeline throughput on a generated urban workload.
static void BM_GeneratedScenarioRun(benchmark::State& state) {
    const auto cfg = generate_scenario(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(cfg));
    }
}
BENCHMARK(BM_GeneratedScenarioRun)->Arg(1)->Arg(7);

// Bundled reference scenario, end to end including report aggregation.
static void BM_ReferenceScenarioRun(benchmark::State& state) {
    const auto cfg = load_scenario(std::string(SCENARIO_DIR) + "/example_b.scn");
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(cfg));
    }
}
BENCHMARK(BM_ReferenceScenarioRun);

BENCHMARK_MAIN();
