#include "stabreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>

#include "stabreg/errors.hpp"

namespace stabreg {

namespace {

constexpr long kUnlimited = std::numeric_limits<long>::max() / 4;

long storage_of(const Scenario& scn, std::size_t link_index) {
  if (scn.unlimited_storage) return kUnlimited;
  const Link& lk = scn.net.links[link_index];
  return static_cast<long>(lk.length_m / scn.jam_spacing_m) * lk.lanes;
}

void validate_scenario(const Scenario& scn) {
  const auto M = static_cast<std::size_t>(scn.net.num_movements());
  if (scn.horizon < 1) throw ConfigError("horizon must be at least one interval");
  if (!(scn.interval_s > 0)) throw ConfigError("interval length must be positive");
  if (!(scn.jam_spacing_m > 0)) throw ConfigError("jam spacing must be positive");
  if (!(scn.pred.theta >= 0 && scn.pred.theta <= 1)) {
    throw ConfigError("information ability must lie in [0, 1]");
  }
  validate_sfr(scn.model);
  if (scn.model.per_movement.size() != M) {
    throw ConfigError("service model size does not match the network");
  }
  if (scn.demand.base.size() != M) {
    throw ConfigError("demand vector size does not match the network");
  }
  for (double a : scn.demand.base) {
    if (!(a >= 0) || !std::isfinite(a)) throw ConfigError("demand rates must be nonnegative");
  }
  if (!scn.demand.profile.empty()) {
    if (scn.demand.profile_segment < 1) {
      throw ConfigError("demand profile needs a positive segment length");
    }
    for (double f : scn.demand.profile) {
      if (!(f >= 0) || !std::isfinite(f)) throw ConfigError("profile factors must be nonnegative");
    }
  }
  if (scn.demand.ramp_period < 0) throw ConfigError("ramp period must be nonnegative");
  if (scn.demand.ramp_period > 0 && scn.demand.ramp_per_step < 0) {
    throw ConfigError("ramp increment must be nonnegative");
  }
  for (int m : scn.demand.ramp_movements) {
    if (m < 0 || m >= scn.net.num_movements()) {
      throw ConfigError("ramp movement index out of range");
    }
  }
}

// Branch of a departing vehicle: 0..B-1 pick the downstream movement, B
// leaves the network (absorbing the remainder of the turning ratios).
int draw_branch(const Scenario& scn, SimState& st, std::size_t m, Rng& rng) {
  const auto& branches = scn.net.downstream[m];
  const std::size_t B = branches.size();
  if (scn.deterministic_routing) {
    auto& credit = st.route_credit[m];
    double exit_w = 1.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double w =
          scn.net.movements[static_cast<std::size_t>(branches[b])].turn_ratio;
      credit[b] += w;
      exit_w -= w;
    }
    credit[B] += std::max(0.0, exit_w);
    std::size_t best = 0;
    for (std::size_t b = 1; b <= B; ++b) {
      if (credit[b] > credit[best] + 1e-12) best = b;
    }
    credit[best] -= 1.0;
    return static_cast<int>(best);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (std::size_t b = 0; b < B; ++b) {
    const double w = scn.net.movements[static_cast<std::size_t>(branches[b])].turn_ratio;
    if (u < w) return static_cast<int>(b);
    u -= w;
  }
  return static_cast<int>(B);
}

// Reverse a deterministic-split draw so a blocked vehicle redraws later from
// unchanged credit state.
void undo_branch(const Scenario& scn, SimState& st, std::size_t m, int branch) {
  if (!scn.deterministic_routing) return;
  auto& credit = st.route_credit[m];
  const auto& branches = scn.net.downstream[m];
  double exit_w = 1.0;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const double w = scn.net.movements[static_cast<std::size_t>(branches[b])].turn_ratio;
    credit[b] -= w;
    exit_w -= w;
  }
  credit[branches.size()] -= std::max(0.0, exit_w);
  credit[static_cast<std::size_t>(branch)] += 1.0;
}

}  // namespace

SimState init_state(const Scenario& scn) {
  validate_scenario(scn);
  const auto M = static_cast<std::size_t>(scn.net.num_movements());
  SimState st;
  st.queue.resize(M);
  st.stacked.assign(M, 0);
  st.occupancy.assign(scn.net.links.size(), 0);
  st.serve_credit.assign(M, 0.0);
  st.route_credit.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    st.route_credit[m].assign(scn.net.downstream[m].size() + 1, 0.0);
  }
  st.delay_by_node.resize(static_cast<std::size_t>(scn.net.num_nodes()));
  return st;
}

long queued_total(const SimState& st) {
  long n = 0;
  for (const auto& q : st.queue) n += static_cast<long>(q.size());
  return n;
}

long stacked_count(const SimState& st) {
  return std::accumulate(st.stacked.begin(), st.stacked.end(), 0L);
}

bool conservation_holds(const SimState& st) {
  return st.entered == st.exited + queued_total(st) + stacked_count(st);
}

std::vector<std::uint8_t> passing_status(const Network& net,
                                         const std::vector<int>& phase_per_node) {
  const auto N = static_cast<std::size_t>(net.num_nodes());
  if (phase_per_node.size() != N) {
    throw SimError("controller returned an invalid phase id");
  }
  std::vector<std::uint8_t> phi(static_cast<std::size_t>(net.num_movements()), 0);
  for (std::size_t n = 0; n < N; ++n) {
    const int k = phase_per_node[n];
    if (k < 0) continue;
    const auto& phases = net.phase_sets[n].phases;
    if (static_cast<std::size_t>(k) >= phases.size()) {
      throw SimError("controller returned an invalid phase id");
    }
    for (int m : phases[static_cast<std::size_t>(k)]) phi[static_cast<std::size_t>(m)] = 1;
  }
  return phi;
}

void step(const Scenario& scn, SimState& st, const std::vector<std::uint8_t>& phi,
          const std::vector<double>& s, const std::vector<long>& arrivals,
          Rng& route_rng) {
  const auto M = static_cast<std::size_t>(scn.net.num_movements());
  if (phi.size() != M || s.size() != M || arrivals.size() != M) {
    throw SimError("step input size does not match the network");
  }

  // Integer discharge caps: floor of rate plus carried fraction, carried only
  // while green so long-run green throughput matches the rates exactly.
  std::vector<long> cap(M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    if (!phi[m]) continue;
    if (!(s[m] >= 0)) throw SimError("negative service rate");
    st.serve_credit[m] += s[m];
    cap[m] = static_cast<long>(st.serve_credit[m]);
    st.serve_credit[m] -= static_cast<double>(cap[m]);
  }

  std::vector<std::vector<Vehicle>> pending(M);  // joins queues after service
  for (std::size_t m = 0; m < M; ++m) {
    const auto origin = static_cast<std::size_t>(
        scn.net.index_of_link(scn.net.movements[m].origin_link));
    const int node = scn.net.index_of_node(scn.net.movements[m].node);
    long served = 0;
    while (served < cap[m] && !st.queue[m].empty()) {
      const Vehicle v = st.queue[m].front();
      const int branch = draw_branch(scn, st, m, route_rng);
      const auto& branches = scn.net.downstream[m];
      if (static_cast<std::size_t>(branch) < branches.size()) {
        const auto j = static_cast<std::size_t>(branches[static_cast<std::size_t>(branch)]);
        const auto dest = static_cast<std::size_t>(
            scn.net.index_of_link(scn.net.movements[j].origin_link));
        if (st.occupancy[dest] >= storage_of(scn, dest)) {
          undo_branch(scn, st, m, branch);
          break;  // head vehicle is blocked; discharge halts this interval
        }
        st.queue[m].pop_front();
        --st.occupancy[origin];
        ++st.occupancy[dest];
        pending[j].push_back({v.id, st.t});
      } else {
        st.queue[m].pop_front();
        --st.occupancy[origin];
        ++st.exited;
      }
      st.delay_by_node[static_cast<std::size_t>(node)].push_back(
          static_cast<double>(st.t - v.enter_t - 1) * scn.interval_s);
      ++served;
    }
  }

  for (std::size_t m = 0; m < M; ++m) {
    for (const Vehicle& v : pending[m]) st.queue[m].push_back(v);
  }

  // Stacked vehicles re-enter first (FIFO), then fresh arrivals join or stack.
  for (std::size_t m = 0; m < M; ++m) {
    const auto origin = static_cast<std::size_t>(
        scn.net.index_of_link(scn.net.movements[m].origin_link));
    const long room = storage_of(scn, origin);
    while (st.stacked[m] > 0 && st.occupancy[origin] < room) {
      --st.stacked[m];
      ++st.occupancy[origin];
      st.queue[m].push_back({st.next_id++, st.t});
    }
    if (arrivals[m] < 0) throw SimError("negative arrival count");
    for (long k = 0; k < arrivals[m]; ++k) {
      ++st.entered;
      if (st.occupancy[origin] < room) {
        ++st.occupancy[origin];
        st.queue[m].push_back({st.next_id++, st.t});
      } else {
        ++st.stacked[m];
      }
    }
  }
  ++st.t;
}

Trace run(const Scenario& scn, Controller& ctrl, const RunOptions& opts) {
  validate_scenario(scn);
  const auto M = static_cast<std::size_t>(scn.net.num_movements());
  const auto N = static_cast<std::size_t>(scn.net.num_nodes());

  Rng supply = make_stream(scn.seed, RngStream::Supply);
  Rng predict_rng = make_stream(scn.seed, RngStream::Predict);
  Rng arrivals_rng = make_stream(scn.seed, RngStream::Arrivals);
  Rng route_rng = make_stream(scn.seed, RngStream::Routing);
  Rng policy_rng = make_stream(scn.seed, RngStream::Policy);

  ctrl.reset();
  SimState st = init_state(scn);
  const bool reveal = ctrl.info() == Controller::Info::NodeReveal;

  std::vector<std::uint8_t> ramp_mask(M, 0);
  if (scn.demand.ramp_period > 0) {
    if (scn.demand.ramp_movements.empty()) {
      for (std::size_t m = 0; m < M; ++m) {
        if (scn.net.boundary_movement(static_cast<int>(m))) ramp_mask[m] = 1;
      }
    } else {
      for (int m : scn.demand.ramp_movements) ramp_mask[static_cast<std::size_t>(m)] = 1;
    }
  }

  Trace tr;
  tr.interval_s = scn.interval_s;
  tr.x.reserve(static_cast<std::size_t>(scn.horizon) + 1);

  std::vector<double> arrive_credit(M, 0.0);
  std::vector<std::size_t> idx(M, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (long t = 0; t < scn.horizon; ++t) {
    std::vector<double> snapshot(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) snapshot[m] = static_cast<double>(st.queue[m].size());
    tr.x.push_back(snapshot);
    tr.stacked_total.push_back(stacked_count(st));

    // Joint service draw as support indices, so node restrictions are exact.
    std::vector<double> s_true(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
      const SfrEntry& entry = scn.model.per_movement[m];
      double u = unit(supply);
      std::size_t k = 0;
      while (k + 1 < entry.prob.size() && u >= entry.prob[k]) {
        u -= entry.prob[k];
        ++k;
      }
      idx[m] = k;
      s_true[m] = entry.support[k];
    }

    ControlInput in;
    in.t = t;
    in.queue = snapshot;
    std::vector<std::uint8_t> hit_row;
    if (reveal) {
      in.revealed.assign(N, -1);
      for (std::size_t n = 0; n < N; ++n) {
        const double u = unit(predict_rng);
        const auto& movs = scn.net.movements_of_node[n];
        if (movs.empty() || u >= scn.pred.theta) continue;
        std::size_t local = 0;
        std::size_t stride = 1;
        for (int m : movs) {
          local += idx[static_cast<std::size_t>(m)] * stride;
          stride *= scn.model.per_movement[static_cast<std::size_t>(m)].support.size();
        }
        in.revealed[n] = static_cast<int>(local);
      }
    } else {
      PredictionOutcome out = predict(scn.pred, scn.model, s_true, predict_rng);
      in.s_hat = std::move(out.s_hat);
      hit_row = std::move(out.hit);
    }

    const std::vector<int> phase = ctrl.decide(in, policy_rng);
    const std::vector<std::uint8_t> phi = passing_status(scn.net, phase);

    std::vector<long> arrivals(M, 0);
    const long ramp_steps =
        scn.demand.ramp_period > 0 ? t / scn.demand.ramp_period : 0;
    double factor = 1.0;
    if (!scn.demand.profile.empty()) {
      const auto seg = static_cast<std::size_t>(t / scn.demand.profile_segment);
      factor = scn.demand.profile[std::min(seg, scn.demand.profile.size() - 1)];
    }
    for (std::size_t m = 0; m < M; ++m) {
      double rate = scn.demand.base[m] * factor;
      if (ramp_mask[m]) rate += scn.demand.ramp_per_step * static_cast<double>(ramp_steps);
      if (rate <= 0) continue;
      if (scn.demand.process == ArrivalProcess::Poisson) {
        std::poisson_distribution<long> pois(rate);
        arrivals[m] = pois(arrivals_rng);
      } else {
        arrive_credit[m] += rate;
        arrivals[m] = static_cast<long>(arrive_credit[m]);
        arrive_credit[m] -= static_cast<double>(arrivals[m]);
      }
    }

    step(scn, st, phi, s_true, arrivals, route_rng);

    tr.phase.push_back(phase);
    tr.green.push_back(phi);
    tr.s_true.push_back(std::move(s_true));
    tr.s_hat.push_back(std::move(in.s_hat));
    tr.hit.push_back(std::move(hit_row));
    ++tr.horizon;

    if (opts.stop_when_stacked_above >= 0 &&
        stacked_count(st) > opts.stop_when_stacked_above) {
      break;
    }
  }

  std::vector<double> last(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) last[m] = static_cast<double>(st.queue[m].size());
  tr.x.push_back(std::move(last));
  tr.stacked_total.push_back(stacked_count(st));
  tr.delay_by_node = std::move(st.delay_by_node);
  tr.entered = st.entered;
  tr.exited = st.exited;
  (void)opts.warmup;
  return tr;
}

StabilityStats stability_stats(const Trace& tr, long warmup) {
  if (tr.horizon < 1 || tr.x.empty()) throw ConfigError("trace is empty");
  StabilityStats out;
  const auto& final_row = tr.x.back();
  for (double v : final_row) {
    out.rate_stat = std::max(out.rate_stat, v / static_cast<double>(tr.horizon));
  }
  const std::size_t first =
      warmup < tr.horizon ? static_cast<std::size_t>(warmup) : 0;
  double acc = 0;
  std::size_t count = 0;
  for (std::size_t t = first; t < tr.x.size(); ++t) {
    acc += std::accumulate(tr.x[t].begin(), tr.x[t].end(), 0.0);
    ++count;
  }
  out.strong_stat = acc / static_cast<double>(count);
  return out;
}

DelayStats delay_stats(const Trace& tr) {
  DelayStats out;
  out.mean_s_by_node.assign(tr.delay_by_node.size(), 0.0);
  out.vehicles_by_node.assign(tr.delay_by_node.size(), 0);
  double total = 0;
  for (std::size_t n = 0; n < tr.delay_by_node.size(); ++n) {
    const auto& d = tr.delay_by_node[n];
    out.vehicles_by_node[n] = static_cast<long>(d.size());
    out.total_vehicles += out.vehicles_by_node[n];
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    total += sum;
    out.mean_s_by_node[n] = d.empty() ? 0.0 : sum / static_cast<double>(d.size());
  }
  out.network_mean_s = out.total_vehicles > 0
                           ? total / static_cast<double>(out.total_vehicles)
                           : 0.0;
  return out;
}

}  // namespace stabreg
