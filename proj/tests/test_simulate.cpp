#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stabreg/control.hpp"
#include "stabreg/errors.hpp"
#include "stabreg/network.hpp"
#include "stabreg/rng.hpp"
#include "stabreg/sfr.hpp"
#include "stabreg/simulate.hpp"
#include "stabreg/stability.hpp"

namespace {

using namespace stabreg;

// Three signalized nodes in series; every movement has its own phase.
Network chain_net() {
  std::vector<Link> links = {
      {11, 0, 1, 150.0, 1},
      {12, 1, 2, 150.0, 1},
      {13, 2, 3, 150.0, 1},
      {14, 3, 0, 150.0, 1},
  };
  std::vector<Movement> movs = {
      {1, 1, 11, 12, 0.0},
      {2, 2, 12, 13, 1.0},
      {3, 3, 13, 14, 1.0},
  };
  return build_network({1, 2, 3}, std::move(links), std::move(movs),
                       {{1, {{1}}}, {2, {{2}}}, {3, {{3}}}});
}

// Two nodes with a short middle link: 35 m stores five vehicles, 14 m two.
Network block_net() {
  std::vector<Link> links = {
      {21, 0, 1, 35.0, 1},
      {22, 1, 2, 14.0, 1},
      {23, 2, 0, 150.0, 1},
  };
  std::vector<Movement> movs = {
      {1, 1, 21, 22, 0.0},
      {2, 2, 22, 23, 1.0},
  };
  return build_network({1, 2}, std::move(links), std::move(movs), {{1, {{1}}}, {2, {{2}}}});
}

// One feeder into a two-way split; the branch ratios may leave exit mass.
Network split_net(double r1, double r2, double mid_len) {
  std::vector<Link> links = {
      {31, 0, 1, 150.0, 1},
      {32, 1, 2, mid_len, 1},
      {33, 2, 0, 150.0, 1},
      {34, 2, 0, 150.0, 1},
  };
  std::vector<Movement> movs = {
      {1, 1, 31, 32, 0.0},
      {2, 2, 32, 33, r1},
      {3, 2, 32, 34, r2},
  };
  return build_network({1, 2}, std::move(links), std::move(movs),
                       {{1, {{1}}}, {2, {{2, 3}}}});
}

SfrModel point_model(std::vector<double> rates) {
  SfrModel model;
  for (double r : rates) model.per_movement.push_back({{r}, {1.0}});
  return model;
}

Scenario base_crossing_scenario() {
  Scenario scn;
  scn.net = fx::crossing();
  scn.model = fx::crossing_sfr();
  scn.demand.base = {0.0, 0.0};
  scn.horizon = 10;
  return scn;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("tandem chain follows the interval dynamics exactly") {
  Scenario scn;
  scn.net = chain_net();
  scn.model = point_model({2.0, 1.0, 3.0});
  scn.demand.base = {0.6, 0.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 20;
  scn.unlimited_storage = true;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{0, 2}, {-1, 1}}, {{0, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);

  static const std::array<std::array<double, 3>, 21> want = {{
      {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 0},
      {1, 1, 0}, {1, 1, 1}, {0, 1, 1}, {1, 1, 0}, {0, 1, 1}, {1, 0, 1},
      {1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {0, 1, 0}, {1, 0, 1}, {1, 1, 0},
      {0, 2, 0}, {1, 1, 1}, {0, 1, 1},
  }};
  REQUIRE(tr.x.size() == want.size());
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t] == std::vector<double>(want[t].begin(), want[t].end()));
  }
  CHECK(tr.entered == 11);
  CHECK(tr.exited == 9);

  const std::vector<double> d0(11, 0.0);
  const std::vector<double> d1 = {0, 10, 0, 10, 0, 0, 0, 0, 10, 10};
  const std::vector<double> d2(9, 0.0);
  CHECK(tr.delay_by_node[0] == d0);
  CHECK(tr.delay_by_node[1] == d1);
  CHECK(tr.delay_by_node[2] == d2);

  const StabilityStats ss = stability_stats(tr, 10);
  CHECK(ss.rate_stat == doctest::Approx(0.05));
  CHECK(ss.strong_stat == doctest::Approx(2.0));

  const DelayStats ds = delay_stats(tr);
  CHECK(ds.vehicles_by_node == std::vector<long>{11, 10, 9});
  CHECK(ds.mean_s_by_node[0] == doctest::Approx(0.0));
  CHECK(ds.mean_s_by_node[1] == doctest::Approx(4.0));
  CHECK(ds.mean_s_by_node[2] == doctest::Approx(0.0));
  CHECK(ds.network_mean_s == doctest::Approx(40.0 / 30.0));
  CHECK(ds.total_vehicles == 30);
}

TEST_CASE("full links block the sender and overflow stacks outside") {
  Scenario scn;
  scn.net = block_net();
  scn.model = point_model({5.0, 1.0});
  scn.demand.base = {1.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 14;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{-1, 8}, {0, 4}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);

  static const std::array<std::array<double, 2>, 15> want = {{
      {0, 0}, {1, 0}, {1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2},
      {5, 2}, {5, 1}, {5, 1}, {5, 1}, {5, 1}, {5, 2}, {5, 2},
  }};
  static const std::array<long, 15> want_stacked = {0, 0, 0, 0, 0, 0, 0, 0,
                                                   1, 2, 2, 2, 2, 2, 3};
  REQUIRE(tr.x.size() == want.size());
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t] == std::vector<double>(want[t].begin(), want[t].end()));
    CHECK(tr.stacked_total[t] == want_stacked[t]);
  }
  CHECK(tr.entered == 14);
  CHECK(tr.exited == 4);
  // entered = exited + queued + stacked at the end of the run.
  CHECK(tr.entered == tr.exited + 5 + 2 + 3);

  const std::vector<double> d0 = {0, 0, 60, 60, 60, 60};
  const std::vector<double> d1 = {60, 60, 0, 0};
  CHECK(tr.delay_by_node[0] == d0);
  CHECK(tr.delay_by_node[1] == d1);
}

TEST_CASE("runs can stop as soon as vehicles stack") {
  Scenario scn;
  scn.net = block_net();
  scn.model = point_model({5.0, 1.0});
  scn.demand.base = {1.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 14;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{-1, 8}, {0, 4}}};
  auto ctrl = make_fixed(scn.net, plan);
  RunOptions opts;
  opts.stop_when_stacked_above = 0;
  const Trace tr = run(scn, *ctrl, opts);
  // The first arrival overflows during interval 7, so eight intervals run.
  CHECK(tr.horizon == 8);
  CHECK(tr.x.size() == 9);
  CHECK(tr.stacked_total.back() == 1);
}

TEST_CASE("deterministic routing alternates equal branches, first index first") {
  Scenario scn;
  scn.net = split_net(0.5, 0.5, 150.0);
  scn.model = point_model({1.0, 5.0, 5.0});
  scn.demand.base = {1.0, 0.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 9;
  scn.unlimited_storage = true;
  scn.deterministic_routing = true;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{-1, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);

  static const std::array<std::array<double, 3>, 10> want = {{
      {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 2, 1},
      {1, 2, 2}, {1, 3, 2}, {1, 3, 3}, {1, 4, 3}, {1, 4, 4},
  }};
  REQUIRE(tr.x.size() == want.size());
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t] == std::vector<double>(want[t].begin(), want[t].end()));
  }
  CHECK(tr.exited == 0);
}

TEST_CASE("leftover turning mass exits deterministically, exit drawn last") {
  Scenario scn;
  scn.net = split_net(0.25, 0.25, 150.0);
  scn.model = point_model({1.0, 5.0, 5.0});
  scn.demand.base = {1.0, 0.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 9;
  scn.unlimited_storage = true;
  scn.deterministic_routing = true;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{-1, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);
  // Served branch order is exit, first, second, exit, repeating.
  CHECK(tr.x.back() == std::vector<double>{1, 2, 2});
  CHECK(tr.exited == 4);
}

TEST_CASE("blocked deterministic draws are undone and redrawn unchanged") {
  Scenario scn;
  scn.net = split_net(0.3, 0.2, 14.0);  // middle link stores two vehicles
  scn.model = point_model({1.0, 5.0, 5.0});
  scn.demand.base = {1.0, 0.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.horizon = 30;
  scn.deterministic_routing = true;
  FixedPlan plan;
  plan.per_node = {{{0, 1}}, {{-1, 6}, {0, 24}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);

  static const std::array<std::array<double, 3>, 31> want = {{
      {0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 1, 1},
      {2, 1, 1}, {3, 0, 0}, {3, 1, 0}, {3, 0, 0}, {3, 0, 0}, {3, 0, 1},
      {3, 1, 0}, {3, 0, 0}, {3, 0, 0}, {3, 1, 0}, {3, 0, 1}, {3, 0, 0},
      {3, 1, 0}, {3, 0, 0}, {3, 0, 0}, {3, 0, 1}, {3, 1, 0}, {3, 0, 0},
      {3, 0, 0}, {3, 1, 0}, {3, 0, 1}, {3, 0, 0}, {3, 1, 0}, {3, 0, 0},
      {3, 0, 0},
  }};
  REQUIRE(tr.x.size() == want.size());
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t] == std::vector<double>(want[t].begin(), want[t].end()));
  }
  CHECK(tr.entered == 30);
  CHECK(tr.exited == 27);
}

TEST_CASE("service credit accrues on green only") {
  Scenario scn = base_crossing_scenario();
  SimState st = init_state(scn);
  Rng rng = make_stream(0, RngStream::Routing);
  const std::vector<double> s = {0.5, 0.0};

  // Preload five vehicles under red.
  step(scn, st, {0, 0}, s, {5, 0}, rng);
  CHECK(conservation_holds(st));
  CHECK(queued_total(st) == 5);

  const std::array<long, 6> want_q = {5, 4, 4, 3, 3, 2};
  for (int i = 0; i < 6; ++i) {
    step(scn, st, {1, 0}, s, {0, 0}, rng);
    CHECK(conservation_holds(st));
    CHECK(queued_total(st) == want_q[static_cast<std::size_t>(i)]);
  }
  // Two red intervals must not bank service.
  step(scn, st, {0, 0}, s, {0, 0}, rng);
  step(scn, st, {0, 0}, s, {0, 0}, rng);
  step(scn, st, {1, 0}, s, {0, 0}, rng);
  CHECK(queued_total(st) == 2);  // half a vehicle of credit so far
  step(scn, st, {1, 0}, s, {0, 0}, rng);
  CHECK(queued_total(st) == 1);

  const std::vector<double> d = {10, 30, 50, 90};
  CHECK(st.delay_by_node[0] == d);
  CHECK(st.exited == 4);
}

TEST_CASE("passing status expands phase picks to movements") {
  const Network cross = fx::crossing();
  CHECK(passing_status(cross, {0}) == std::vector<std::uint8_t>{1, 0});
  CHECK(passing_status(cross, {1}) == std::vector<std::uint8_t>{0, 1});
  CHECK(passing_status(cross, {-1}) == std::vector<std::uint8_t>{0, 0});
  CHECK_THROWS_AS(passing_status(cross, {2}), SimError);
  CHECK_THROWS_AS(passing_status(cross, {}), SimError);

  const Network two = fx::two_intersections();
  CHECK(passing_status(two, {1, 0}) ==
        std::vector<std::uint8_t>{0, 1, 1, 0, 1, 1, 0, 0});
}

TEST_CASE("scenario validation rejects malformed inputs") {
  const Scenario good = base_crossing_scenario();
  CHECK_NOTHROW(init_state(good));

  Scenario s1 = good;
  s1.horizon = 0;
  CHECK_THROWS_AS(init_state(s1), ConfigError);
  Scenario s2 = good;
  s2.interval_s = 0;
  CHECK_THROWS_AS(init_state(s2), ConfigError);
  Scenario s3 = good;
  s3.jam_spacing_m = -1;
  CHECK_THROWS_AS(init_state(s3), ConfigError);
  Scenario s4 = good;
  s4.pred.theta = 1.5;
  CHECK_THROWS_AS(init_state(s4), ConfigError);
  Scenario s5 = good;
  s5.model.per_movement.pop_back();
  CHECK_THROWS_AS(init_state(s5), ConfigError);
  Scenario s6 = good;
  s6.demand.base = {1.0};
  CHECK_THROWS_AS(init_state(s6), ConfigError);
  Scenario s7 = good;
  s7.demand.base = {-0.5, 0.0};
  CHECK_THROWS_AS(init_state(s7), ConfigError);
  Scenario s8 = good;
  s8.demand.profile = {2.0};
  CHECK_THROWS_AS(init_state(s8), ConfigError);
  s8.demand.profile_segment = 5;
  CHECK_NOTHROW(init_state(s8));
  s8.demand.profile = {2.0, -1.0};
  CHECK_THROWS_AS(init_state(s8), ConfigError);
  Scenario s9 = good;
  s9.demand.ramp_period = -1;
  CHECK_THROWS_AS(init_state(s9), ConfigError);
  Scenario s10 = good;
  s10.demand.ramp_period = 2;
  s10.demand.ramp_movements = {9};
  CHECK_THROWS_AS(init_state(s10), ConfigError);
  Scenario s11 = good;
  s11.demand.ramp_period = 2;
  s11.demand.ramp_per_step = -0.5;
  CHECK_THROWS_AS(init_state(s11), ConfigError);
}

TEST_CASE("step validates its vectors") {
  Scenario scn = base_crossing_scenario();
  SimState st = init_state(scn);
  Rng rng = make_stream(0, RngStream::Routing);
  CHECK_THROWS_AS(step(scn, st, {1}, {1.0, 1.0}, {0, 0}, rng), SimError);
  CHECK_THROWS_AS(step(scn, st, {1, 0}, {-1.0, 1.0}, {0, 0}, rng), SimError);
  CHECK_THROWS_AS(step(scn, st, {1, 0}, {1.0, 1.0}, {-1, 0}, rng), SimError);
}

TEST_CASE("zero demand leaves the network empty") {
  Scenario scn = base_crossing_scenario();
  scn.horizon = 100;
  auto ctrl = make_bp(scn.net);
  const Trace tr = run(scn, *ctrl);
  for (const auto& row : tr.x) {
    CHECK(row == std::vector<double>{0, 0});
  }
  CHECK(tr.entered == 0);
  CHECK(tr.exited == 0);
  CHECK(delay_stats(tr).total_vehicles == 0);
  CHECK(stability_stats(tr).rate_stat == doctest::Approx(0.0));
}

TEST_CASE("identical seeds reproduce runs bit for bit") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.0, 0.6};
  scn.pred.theta = 0.7;
  scn.horizon = 300;
  scn.unlimited_storage = true;
  scn.seed = 8;
  auto ctrl = make_bp(scn.net);

  const Trace a = run(scn, *ctrl);
  const Trace b = run(scn, *ctrl);
  CHECK(a.x == b.x);
  CHECK(a.green == b.green);
  CHECK(a.s_true == b.s_true);
  CHECK(a.entered == b.entered);

  scn.seed = 9;
  const Trace c = run(scn, *ctrl);
  CHECK(a.x != c.x);
}

TEST_CASE("arrival and supply draws are shared across policies") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.0, 0.6};
  scn.horizon = 300;
  scn.unlimited_storage = true;
  scn.seed = 5;
  auto bp = make_bp(scn.net);
  FixedPlan plan;
  plan.per_node = {{{0, 3}, {1, 3}}};
  auto fx_ctrl = make_fixed(scn.net, plan);

  const Trace a = run(scn, *bp);
  const Trace b = run(scn, *fx_ctrl);
  CHECK(a.entered == b.entered);
  CHECK(a.s_true == b.s_true);
}

TEST_CASE("poisson arrivals match their mean over a long run") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {2.0, 1.0};
  scn.horizon = 4000;
  scn.unlimited_storage = true;
  scn.seed = 17;
  FixedPlan plan;
  plan.per_node = {{{-1, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);
  CHECK(std::abs(tr.x.back()[0] - 8000.0) < 400.0);
  CHECK(std::abs(tr.x.back()[1] - 4000.0) < 300.0);
  CHECK(tr.entered == static_cast<long>(tr.x.back()[0] + tr.x.back()[1]));
}

TEST_CASE("prediction bookkeeping lands in the trace") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {0.5, 0.3};
  scn.pred.theta = 0.6;
  scn.horizon = 3000;
  scn.unlimited_storage = true;
  scn.seed = 23;
  auto ctrl = make_bp(scn.net);
  const Trace tr = run(scn, *ctrl);

  double reveals0 = 0, ok0 = 0, ok1 = 0;
  for (long t = 0; t < tr.horizon; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    REQUIRE(tr.s_hat[tu].size() == 2);
    REQUIRE(tr.hit[tu].size() == 2);
    reveals0 += tr.hit[tu][0];
    if (tr.hit[tu][0]) CHECK(tr.s_hat[tu][0] == tr.s_true[tu][0]);
    ok0 += prediction_correct(tr.s_hat[tu][0], tr.s_true[tu][0], 1.0) ? 1 : 0;
    ok1 += prediction_correct(tr.s_hat[tu][1], tr.s_true[tu][1], 1.0) ? 1 : 0;
    // Movement 0 predictions are either a support point or the mean 1.7.
    const double v = tr.s_hat[tu][0];
    CHECK((std::abs(v - 1.0) < 1e-12 || std::abs(v - 2.0) < 1e-12 ||
           std::abs(v - 1.7) < 1e-12));
  }
  const auto h = static_cast<double>(tr.horizon);
  // The hit flag marks reveals, which happen at rate theta.
  CHECK(std::abs(reveals0 / h - 0.6) < 0.03);
  // Band correctness: theta + (1 - theta) * P(mean guess inside the band).
  CHECK(std::abs(ok0 / h - 0.88) < 0.03);
  CHECK(std::abs(ok1 / h - 0.80) < 0.03);
}

TEST_CASE("reveal policies run without rate predictions") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.19, 0.45};
  scn.pred.theta = 1.0;
  scn.horizon = 50;
  scn.unlimited_storage = true;
  const auto res = reserve_demand(scn.net, scn.model, {1.19, 0.45}, 1.0);
  REQUIRE(res.status == LpStatus::Optimal);
  auto ctrl = make_sfr_only(scn.net, scn.model, res.schedule);
  const Trace tr = run(scn, *ctrl);
  for (long t = 0; t < tr.horizon; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    CHECK(tr.s_hat[tu].empty());
    CHECK(tr.hit[tu].empty());
    CHECK(tr.phase[tu][0] >= -1);
    CHECK(tr.phase[tu][0] <= 1);
  }
}

TEST_CASE("queue policy keeps an interior demand stable") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.19, 0.45};
  scn.pred.theta = 1.0;
  scn.horizon = 3000;
  scn.unlimited_storage = true;
  scn.seed = 3;
  auto ctrl = make_bp(scn.net);
  const Trace tr = run(scn, *ctrl);
  const StabilityStats ss = stability_stats(tr, 60);
  CHECK(ss.rate_stat < 0.05);
  CHECK(ss.strong_stat < 50.0);
}

TEST_CASE("scheduled mixture policy holds its design point") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.19, 0.45};
  scn.pred.theta = 0.5;
  scn.horizon = 4000;
  scn.unlimited_storage = true;
  scn.seed = 41;
  const auto res = reserve_demand(scn.net, scn.model, {1.19, 0.45}, 0.5);
  REQUIRE(res.status == LpStatus::Optimal);
  REQUIRE(res.eps_max > 0.05);
  auto ctrl = make_sfr_only(scn.net, scn.model, res.schedule);
  const Trace tr = run(scn, *ctrl);
  CHECK(stability_stats(tr, 60).rate_stat < 0.05);
}

TEST_CASE("piecewise profile scales the base demand and holds its last factor") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {1.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.demand.profile = {2.0, 0.5};
  scn.demand.profile_segment = 3;
  scn.horizon = 8;
  scn.unlimited_storage = true;
  FixedPlan plan;
  plan.per_node = {{{-1, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);
  const std::array<double, 9> want = {0, 2, 4, 6, 6, 7, 7, 8, 8};
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t][0] == want[t]);
    CHECK(tr.x[t][1] == 0);
  }
  CHECK(tr.entered == 8);
}

TEST_CASE("demand ramps climb every period on the listed movements") {
  Scenario scn = base_crossing_scenario();
  scn.demand.base = {0.0, 0.0};
  scn.demand.process = ArrivalProcess::Deterministic;
  scn.demand.ramp_per_step = 0.5;
  scn.demand.ramp_period = 4;
  scn.demand.ramp_movements = {0};
  scn.horizon = 12;
  scn.unlimited_storage = true;
  FixedPlan plan;
  plan.per_node = {{{-1, 1}}};
  auto ctrl = make_fixed(scn.net, plan);
  const Trace tr = run(scn, *ctrl);
  const std::array<double, 13> want = {0, 0, 0, 0, 0, 0, 1, 1, 2, 3, 4, 5, 6};
  for (std::size_t t = 0; t < want.size(); ++t) {
    CAPTURE(t);
    CHECK(tr.x[t][0] == want[t]);
    CHECK(tr.x[t][1] == 0);
  }
  CHECK(tr.entered == 6);

  // An empty movement list ramps every boundary movement.
  scn.demand.ramp_movements = {};
  const Trace tr2 = run(scn, *ctrl);
  for (std::size_t t = 0; t < want.size(); ++t) {
    CHECK(tr2.x[t][0] == want[t]);
    CHECK(tr2.x[t][1] == want[t]);
  }
}

TEST_CASE("stability statistics reduce the trace") {
  Trace tr;
  tr.horizon = 2;
  tr.interval_s = 10;
  tr.x = {{0, 0}, {2, 2}, {4, 6}};
  tr.stacked_total = {0, 0, 0};
  const StabilityStats a = stability_stats(tr, 1);
  CHECK(a.rate_stat == doctest::Approx(3.0));
  CHECK(a.strong_stat == doctest::Approx(7.0));
  // Warmup beyond the horizon falls back to the whole trace.
  const StabilityStats b = stability_stats(tr, 5);
  CHECK(b.strong_stat == doctest::Approx(14.0 / 3.0));

  Trace empty;
  CHECK_THROWS_AS(stability_stats(empty), ConfigError);
}

TEST_CASE("delay statistics aggregate per node") {
  Trace tr;
  tr.horizon = 1;
  tr.delay_by_node = {{0, 10}, {}, {30}};
  const DelayStats ds = delay_stats(tr);
  CHECK(ds.mean_s_by_node == std::vector<double>{5, 0, 30});
  CHECK(ds.vehicles_by_node == std::vector<long>{2, 0, 1});
  CHECK(ds.total_vehicles == 3);
  CHECK(ds.network_mean_s == doctest::Approx(40.0 / 3.0));
}

}  // TEST_SUITE
