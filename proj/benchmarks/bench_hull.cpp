#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "stabreg/stability.hpp"

static void BM_RegionHull(benchmark::State& state) {
  auto net = fx::crossing();
  auto model = fx::crossing_sfr();
  const int dirs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto region = stabreg::region_hull_2d(net, model, 1.0, dirs);
    benchmark::DoNotOptimize(region.area);
  }
}
BENCHMARK(BM_RegionHull)->Arg(16)->Arg(64)->Arg(256);
