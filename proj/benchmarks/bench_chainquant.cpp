#include <benchmark/benchmark.h>

#include <chainquant/quantizer.hpp>

#include <map>

using namespace cq;

namespace {

const ChainSystem& quartic_system(int k_max) {
    static std::map<int, ChainSystem> cache;
    auto it = cache.find(k_max);
    if (it == cache.end()) {
        IterationConfig cfg;
        cfg.k_max = k_max;
        cfg.k_eval = std::max(512, 4 * k_max);
        it = cache.emplace(k_max, make_system(Potential(4), Sector::neumann, cfg)).first;
    }
    return it->second;
}

}  // namespace

static void BM_LogDet(benchmark::State& state) {
    const auto& sys = quartic_system(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(log_det(sys.chains[0], cplx(-1.0, 0.5)));
}
BENCHMARK(BM_LogDet)->Arg(48)->Arg(192)->Arg(384);

static void BM_Sigma(benchmark::State& state) {
    const auto& sys = quartic_system(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sigma(sys, 0, 1.06));
}
BENCHMARK(BM_Sigma)->Arg(48)->Arg(384);

static void BM_Cycle(benchmark::State& state) {
    IterationConfig cfg;
    cfg.k_max = static_cast<int>(state.range(0));
    cfg.k_eval = std::max(512, 4 * cfg.k_max);
    cfg.jobs = static_cast<int>(state.range(1));
    const auto sys = make_system(Potential(4, {0.0, 1.0, 0.0}), Sector::neumann, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(iterate_once(sys, cfg));
}
BENCHMARK(BM_Cycle)->Args({48, 1})->Args({48, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
