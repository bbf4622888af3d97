#include <benchmark/benchmark.h>

#include "mfcg/async.hpp"
#include "mfcg/envs.hpp"
#include "mfcg/sync.hpp"

using namespace mfcg;

static void BM_StepIdeal(benchmark::State& state) {
    MeanFieldModel m = build_two_state(TwoStateParams{});
    RateExponents e;
    IdealState s = init_ideal(m);
    for (auto _ : state) {
        s = step_ideal(m, s, e);
        benchmark::DoNotOptimize(s.q.v.data());
    }
}
BENCHMARK(BM_StepIdeal);

static void BM_StepSync(benchmark::State& state) {
    MeanFieldModel m = build_two_state(TwoStateParams{});
    RateExponents e;
    IdealState s = init_ideal(m);
    for (auto _ : state) {
        s = step_sync(m, s, e, 1, nullptr);
        benchmark::DoNotOptimize(s.q.v.data());
    }
}
BENCHMARK(BM_StepSync);

static void BM_StepAsync(benchmark::State& state) {
    MeanFieldModel m = build_two_state(TwoStateParams{});
    RateExponents e;
    AsyncState s = init_async(m, 1);
    for (auto _ : state) {
        s = step_async(m, s, e);
        benchmark::DoNotOptimize(s.q.v.data());
    }
}
BENCHMARK(BM_StepAsync);

static void BM_SolveQGase(benchmark::State& state) {
    MeanFieldModel m = build_two_state(TwoStateParams{});
    const SimplexDist mu = SimplexDist::uniform(2);
    for (auto _ : state) {
        QTable q = solve_q_gase(m, mu, 1e-10);
        benchmark::DoNotOptimize(q.v.data());
    }
}
BENCHMARK(BM_SolveQGase);

static void BM_SolveGlobalGase(benchmark::State& state) {
    MeanFieldModel m = build_two_state(TwoStateParams{});
    for (auto _ : state) {
        SolutionTriple sol = solve_global_gase(m, 1e-10);
        benchmark::DoNotOptimize(sol.mu_star_phi.probs().data());
    }
}
BENCHMARK(BM_SolveGlobalGase);

BENCHMARK_MAIN();
