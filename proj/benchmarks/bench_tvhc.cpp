#include <benchmark/benchmark.h>

#include "tvhc/cost.hpp"
#include "tvhc/family.hpp"
#include "tvhc/optimal.hpp"
#include "tvhc/simulator.hpp"

namespace {

using namespace tvhc;

void BM_Simulate(benchmark::State& state) {
    const FamilySetup d = deadline_family();
    const SystemParams p = d.params_at(0.8);
    SimOptions opts;
    opts.horizon_events = static_cast<std::uint64_t>(state.range(0));
    opts.warmup_events = opts.horizon_events / 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(p, PolicySpec::lookahead(), d.c1, d.c2, opts).total_cost);
        ++opts.seed;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_ExpShiftMeanClosed(benchmark::State& state) {
    const HoldingCostFn f = HoldingCostFn::polynomial({1.0, 0.5, 0.25, 0.125});
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exp_shift_mean(f, t, 2.0));
        t += 1e-6;
    }
}
BENCHMARK(BM_ExpShiftMeanClosed);

void BM_ExpShiftMeanQuadrature(benchmark::State& state) {
    const HoldingCostFn f = HoldingCostFn::polynomial({1.0, 0.5, 0.25, 0.125});
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exp_shift_mean_quadrature(f, t, 2.0));
        t += 1e-6;
    }
}
BENCHMARK(BM_ExpShiftMeanQuadrature);

void BM_SolveAlphaStar(benchmark::State& state) {
    const FamilySetup q = quadratic_family();
    const SystemParams p = q.params_at(0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_alpha_star(p, q.c1, q.c2).age());
    }
}
BENCHMARK(BM_SolveAlphaStar);

}  // namespace

BENCHMARK_MAIN();
