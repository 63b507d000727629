#include <benchmark/benchmark.h>

#include "rwre/env.hpp"
#include "rwre/rng.hpp"
#include "rwre/walk.hpp"

namespace {

using namespace rwre;

// Steps per second of a quenched walk on the lazily realised environment.
void BM_QuenchedSteps(benchmark::State& state) {
    const LazyEnvironment env(uniform_law(2), 3);
    CounterRng rng(11);
    Point x{};
    for (auto _ : state) {
        x = quenched_step(env, x, rng);
        benchmark::DoNotOptimize(x);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuenchedSteps);

void BM_ExitFromBox(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    std::uint64_t r = 0;
    for (auto _ : state) {
        const LazyEnvironment env(uniform_law(2), derive_key(41, {r, 1}));
        CounterRng rng(derive_key(41, {r++, 2}));
        const auto res = run_quenched(env, Point{}, StopKind::exit, [&](const Point& p) { return sup_norm(p) <= radius; },
                                      100'000'000, rng);
        benchmark::DoNotOptimize(res.steps);
    }
}
BENCHMARK(BM_ExitFromBox)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_SampleWindow(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const auto law = counterexample_law(0.9, 0.5, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(sample_window(law, Box::ball(2, radius), 3).at(Point{})[Direction(1)]);
}
BENCHMARK(BM_SampleWindow)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace
