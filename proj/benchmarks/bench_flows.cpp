#include <benchmark/benchmark.h>

#include "rwre/env.hpp"
#include "rwre/exploration.hpp"
#include "rwre/flows.hpp"
#include "rwre/rng.hpp"

namespace {

using namespace rwre;

// Max flow from the origin to the boundary of a box with random capacities.
void BM_MaxFlowLatticeBox(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const Box box = Box::ball(2, radius);
    const DirectedGraph g = DirectedGraph::lattice_box(box);
    CounterRng rng(derive_key(17, {static_cast<std::uint64_t>(radius)}));
    CapacityMap cap(g.edge_count());
    for (auto& c : cap) c = rng.uniform();
    Terminals t{{Point{}}, sphere(2, radius)};
    for (auto _ : state) benchmark::DoNotOptimize(max_flow(g, cap, t).value);
    state.counters["edges"] = static_cast<double>(g.edge_count());
}
BENCHMARK(BM_MaxFlowLatticeBox)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Explore(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const SiteLaw law = counterexample_law(0.9, 0.5, 0.25);
    const auto env = sample_window(law, Box::ball(2, radius), 23);
    for (auto _ : state) benchmark::DoNotOptimize(explore(env, radius).edges.size());
}
BENCHMARK(BM_Explore)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_VerifyFlowStrength(benchmark::State& state) {
    const int radius = static_cast<int>(state.range(0));
    const auto law = counterexample_law(0.9, 0.5, 0.25);
    const auto env = sample_window(law, Box::ball(2, radius), 29);
    const auto g = explore(env, radius);
    const auto x = natural_exponents(std::get<CounterexampleLaw>(law.kind));
    for (auto _ : state) benchmark::DoNotOptimize(verify_flow_strength(g, x, 1.0).max_flow);
}
BENCHMARK(BM_VerifyFlowStrength)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
