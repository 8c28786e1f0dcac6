#include <benchmark/benchmark.h>

#include <cmath>

#include "lipdim/components.hpp"
#include "lipdim/generators.hpp"

using namespace lipdim;

static void BM_RComponentsCloud(benchmark::State& state) {
  const auto x = random_cloud(static_cast<std::size_t>(state.range(0)), 2, 1);
  const double r = 1.5 / std::sqrt(static_cast<double>(x.size()));
  for (auto _ : state) benchmark::DoNotOptimize(r_components(x, r).count());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RComponentsCloud)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_RComponentsHeisenberg(benchmark::State& state) {
  const auto x = heisenberg_net(1.0, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(r_components(x, 0.25).count());
  state.counters["points"] = static_cast<double>(x.size());
}
BENCHMARK(BM_RComponentsHeisenberg)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Dendrogram(benchmark::State& state) {
  const auto x = random_cloud(static_cast<std::size_t>(state.range(0)), 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dendrogram(x).merges.size());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dendrogram)->RangeMultiplier(4)->Range(1 << 8, 1 << 12)->Complexity();

static void BM_ComponentsProfileCarpet(benchmark::State& state) {
  const auto x = carpet(3, static_cast<int>(state.range(0)));
  const auto ladder = certified_ladder(x, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(components_profile(x, ladder).size());
  state.counters["points"] = static_cast<double>(x.size());
}
BENCHMARK(BM_ComponentsProfileCarpet)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
