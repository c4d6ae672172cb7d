#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "stabreg/control.hpp"
#include "stabreg/network.hpp"
#include "stabreg/rng.hpp"
#include "stabreg/sfr.hpp"

namespace stabreg {

enum class ArrivalProcess {
  Poisson,
  Deterministic,  // error-diffused integer arrivals at the exact mean rate
};

struct DemandSpec {
  std::vector<double> base;  // vehicles per interval, dense movement order
  ArrivalProcess process = ArrivalProcess::Poisson;
  // Piecewise-constant multiplier on the base rates: segment i spans
  // profile_segment intervals at factor profile[i], holding the last factor
  // afterwards. Empty means a flat factor of 1.
  std::vector<double> profile;
  long profile_segment = 0;
  // Ramp: every ramp_period intervals the listed movements gain ramp_per_step
  // vehicles per interval. Period 0 disables the ramp; an empty movement list
  // ramps every boundary movement.
  double ramp_per_step = 0;
  long ramp_period = 0;
  std::vector<int> ramp_movements;
};

struct Scenario {
  Network net;
  SfrModel model;
  Predictor pred;
  DemandSpec demand;
  long horizon = 1;
  double interval_s = 10.0;
  double jam_spacing_m = 7.0;
  // Theory-facing runs use unbounded links; storage and stacking only matter
  // for the boundary-congestion protocol.
  bool unlimited_storage = false;
  bool deterministic_routing = false;  // per-branch error-diffused splits
  std::uint64_t seed = 0;
};

struct Vehicle {
  long id = 0;
  long enter_t = 0;  // interval in which it joined the current queue
};

struct SimState {
  long t = 0;
  std::vector<std::deque<Vehicle>> queue;  // per movement, front is the head
  std::vector<long> stacked;               // per movement, waiting outside
  std::vector<long> occupancy;             // per link, queued plus in-transit
  std::vector<double> serve_credit;        // fractional service carried on green
  std::vector<std::vector<double>> route_credit;  // deterministic-split state
  std::vector<std::vector<double>> delay_by_node;  // seconds per cleared vehicle
  long entered = 0;
  long exited = 0;
  long next_id = 0;
};

SimState init_state(const Scenario& scn);

long queued_total(const SimState& st);
long stacked_count(const SimState& st);
// entered == exited + queued + stacked, exactly, between steps.
bool conservation_holds(const SimState& st);

// Passing-status vector for one phase choice per node (-1 = node all red).
// Throws SimError on an invalid phase id.
std::vector<std::uint8_t> passing_status(const Network& net,
                                         const std::vector<int>& phase_per_node);

// One interval: green queues discharge up to their integer service cap from
// the interval-start backlog, departures route downstream (or exit) vehicle
// by vehicle, routed vehicles join their next queue at the end of the
// interval, then stacked vehicles re-enter FIFO and exogenous arrivals join
// or stack. A vehicle whose destination link is full stays at the head and
// halts its movement's discharge for the interval.
void step(const Scenario& scn, SimState& st, const std::vector<std::uint8_t>& phi,
          const std::vector<double>& s, const std::vector<long>& arrivals,
          Rng& route_rng);

struct Trace {
  long horizon = 0;       // intervals actually run
  double interval_s = 0;
  std::vector<std::vector<double>> x;    // horizon + 1 snapshots
  std::vector<long> stacked_total;       // horizon + 1 snapshots
  std::vector<std::vector<int>> phase;   // per interval, per node
  std::vector<std::vector<std::uint8_t>> green;  // per interval, per movement
  std::vector<std::vector<double>> s_true;
  std::vector<std::vector<double>> s_hat;       // empty rows for reveal policies
  std::vector<std::vector<std::uint8_t>> hit;   // prediction bookkeeping
  std::vector<std::vector<double>> delay_by_node;
  long entered = 0;
  long exited = 0;
};

struct RunOptions {
  long warmup = 60;                    // recorded for downstream statistics
  long stop_when_stacked_above = -1;   // negative runs the full horizon
};

// Deterministic for a fixed (scenario, controller, seed); replications across
// seeds are independent and safe to run on separate threads, one state and
// rng set each.
Trace run(const Scenario& scn, Controller& ctrl, const RunOptions& opts = {});

struct StabilityStats {
  double rate_stat = 0;    // max_m x_m(T) / T
  double strong_stat = 0;  // time-mean of the total queue past warmup
};

StabilityStats stability_stats(const Trace& tr, long warmup = 60);

struct DelayStats {
  std::vector<double> mean_s_by_node;
  std::vector<long> vehicles_by_node;
  double network_mean_s = 0;
  long total_vehicles = 0;
};

DelayStats delay_stats(const Trace& tr);

}  // namespace stabreg
