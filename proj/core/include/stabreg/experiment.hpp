#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stabreg/control.hpp"
#include "stabreg/simulate.hpp"
#include "stabreg/stats.hpp"

namespace stabreg {

using ControllerFactory = std::function<std::unique_ptr<Controller>(const Network&)>;

// Boundary-congestion protocol: demand climbs by a fixed increment on a fixed
// period until the stacked-vehicle count crosses a threshold; the climb
// reached at crossing estimates the demand reserve.
struct RampConfig {
  double increment_veh_h = 5.0;
  double period_s = 60.0;
  std::vector<long> thresholds{100};
  long max_intervals = 20000;
  bool ramp_all_movements = false;  // default ramps only boundary movements
};

struct RampRow {
  int replication = 0;
  std::uint64_t seed = 0;
  long threshold = 0;
  long crossing_interval = -1;  // first interval with stacked above threshold
  long ramp_steps = 0;          // completed demand increments at crossing
  double eps_hat = 0;           // added demand, vehicles per interval
  double eps_hat_veh_h = 0;
  bool censored = false;        // horizon ended below the threshold
};

struct RampReport {
  std::vector<long> thresholds;
  std::vector<RampRow> rows;        // replication-major, threshold-minor
  std::vector<BoxSummary> summary;  // per threshold, censored rows excluded
  std::uint64_t base_seed = 0;
  int replications = 0;
};

RampReport run_reserve_experiment(const Scenario& base, const ControllerFactory& make_ctrl,
                                  const RampConfig& cfg, int replications,
                                  std::uint64_t base_seed, int jobs = 1);

// One (controller, ability, guess) cell of a delay sweep.
struct DelayCell {
  std::string controller;
  ControllerFactory make;
  double theta = 0;
  GuessStrategy guess = GuessStrategy::MeanPoint;
};

struct DelayRow {
  std::string controller;
  double theta = 0;
  int guess = 0;  // 0 mean-point, 1 empirical
  int replication = 0;
  std::uint64_t seed = 0;
  double eta_analytic = 0;
  double hit_rate = 0;
  double mean_delay_s = 0;
  double rate_stat = 0;
  double strong_stat = 0;
};

struct DelayCellSummary {
  std::string controller;
  double theta = 0;
  int guess = 0;
  long n = 0;
  double delay_mean = 0;
  double delay_sd = 0;
  double hit_rate_mean = 0;
};

struct DelayReport {
  std::vector<DelayRow> rows;  // cell-major, replication-minor
  std::vector<DelayCellSummary> summary;
  std::uint64_t base_seed = 0;
  int replications = 0;
};

// Replications share seeds across cells, so per-seed comparisons between
// cells are paired.
DelayReport run_delay_sweep(const Scenario& base, const std::vector<DelayCell>& cells,
                            int replications, std::uint64_t base_seed, int jobs = 1);

// Runs fn(0..n-1) across at most `jobs` threads; any exception is rethrown
// on the calling thread after all workers finish.
void parallel_for(long n, int jobs, const std::function<void(long)>& fn);

}  // namespace stabreg
