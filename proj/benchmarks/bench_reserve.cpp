#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "stabreg/stability.hpp"

static void BM_ReserveTwoIntersections(benchmark::State& state) {
  auto net = fx::two_intersections();
  auto model = fx::two_intersections_sfr();
  auto a = fx::two_intersections_demand();
  const double theta = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    auto res = stabreg::reserve_demand(net, model, a, theta);
    benchmark::DoNotOptimize(res.eps_max);
  }
}
BENCHMARK(BM_ReserveTwoIntersections)->Arg(0)->Arg(50)->Arg(100);

static void BM_ReserveCrossing(benchmark::State& state) {
  auto net = fx::crossing();
  auto model = fx::crossing_sfr();
  std::vector<double> a{1.19, 0.45};
  for (auto _ : state) {
    auto res = stabreg::reserve_demand(net, model, a, 1.0);
    benchmark::DoNotOptimize(res.eps_max);
  }
}
BENCHMARK(BM_ReserveCrossing);
