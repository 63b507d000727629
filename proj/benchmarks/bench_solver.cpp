#include <benchmark/benchmark.h>

#include "rwre/env.hpp"
#include "rwre/solver.hpp"

namespace {

using namespace rwre;

void BM_EscapeProbability(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const auto method = static_cast<SolveMethod>(state.range(1));
    const auto env = sample_window(uniform_law(2), Box::ball(2, radius + 1), 5);
    SolveOptions opt;
    opt.method = method;
    opt.tolerance = 1e-10;
    for (auto _ : state) benchmark::DoNotOptimize(escape_probability(env, radius, opt));
    state.SetLabel(to_string(method));
}
BENCHMARK(BM_EscapeProbability)
    ->ArgsProduct({{4, 8, 16}, {static_cast<long>(SolveMethod::dense), static_cast<long>(SolveMethod::sparse)}})
    ->Args({32, static_cast<long>(SolveMethod::sparse)})
    ->Args({8, static_cast<long>(SolveMethod::iterative)})
    ->Unit(benchmark::kMillisecond);

void BM_MaxHitting(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const auto env = sample_window(uniform_law(2), Box::ball(2, radius + 1), 7);
    for (auto _ : state) benchmark::DoNotOptimize(max_hitting_probability(env, radius).max_probability);
}
BENCHMARK(BM_MaxHitting)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
