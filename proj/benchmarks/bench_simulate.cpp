#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "stabreg/control.hpp"
#include "stabreg/simulate.hpp"

static void BM_SimulateBp(benchmark::State& state) {
  stabreg::Scenario scn;
  scn.net = fx::two_intersections();
  scn.model = fx::two_intersections_sfr();
  scn.pred.theta = 1.0;
  scn.demand.base = fx::two_intersections_demand();
  scn.horizon = static_cast<int>(state.range(0));
  scn.seed = 7;
  for (auto _ : state) {
    auto ctrl = stabreg::make_bp(scn.net);
    auto tr = stabreg::run(scn, *ctrl);
    benchmark::DoNotOptimize(tr.x.back());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateBp)->Arg(1000)->Arg(5000);
