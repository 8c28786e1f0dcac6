#include <benchmark/benchmark.h>

#include <cmath>

#include <memory>

#include "lipdim/constructions.hpp"
#include "lipdim/generators.hpp"
#include "lipdim/lightness.hpp"

using namespace lipdim;

namespace {
SpacePtr share(FiniteMetricSpace x) { return std::make_shared<const FiniteMetricSpace>(std::move(x)); }
}  // namespace

static void BM_ProfileKochProjection(benchmark::State& state) {
  const auto k = share(koch(static_cast<int>(state.range(0))));
  const auto f = coordinate_projection(k, {0});
  const auto ladder = certified_ladder(*k, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ll_profile(f, ladder).max_constant());
  state.counters["points"] = static_cast<double>(k->size());
}
BENCHMARK(BM_ProfileKochProjection)->DenseRange(4, 5)->Unit(benchmark::kMillisecond);

static void BM_ProfileCarpetWindows(benchmark::State& state) {
  const auto c = share(carpet(3, 3, Sampling::Centers));
  const auto f = line_projection(c, {-std::sqrt(2.0), 1.0});
  LightnessOptions o;
  o.windows = static_cast<WindowMode>(state.range(0));
  const auto ladder = certified_ladder(*c, c->diameter());
  for (auto _ : state) benchmark::DoNotOptimize(ll_profile(f, ladder, o).max_constant());
  state.SetLabel(to_string(o.windows));
}
BENCHMARK(BM_ProfileCarpetWindows)
    ->Arg(static_cast<int>(WindowMode::Ball))
    ->Arg(static_cast<int>(WindowMode::Grid))
    ->Unit(benchmark::kMillisecond);

static void BM_ConstantAtScaleHarmonic(benchmark::State& state) {
  const auto h = share(harmonic(static_cast<std::size_t>(state.range(0))));
  const auto f = constant_map(h);
  const double r = 4.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ll_constant_at_scale(f, r).constant);
}
BENCHMARK(BM_ConstantAtScaleHarmonic)->RangeMultiplier(10)->Range(1000, 100000);
