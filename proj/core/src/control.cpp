#include "stabreg/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>

#include "stabreg/errors.hpp"
#include "stabreg/lp.hpp"

namespace stabreg {

namespace {

void check_input(const Network& net, const ControlInput& in, bool needs_rates) {
  if (in.queue.size() != static_cast<std::size_t>(net.num_movements())) {
    throw SimError("controller input queue size does not match the network");
  }
  if (needs_rates && in.s_hat.size() != in.queue.size()) {
    throw SimError("controller expected a predicted rate per movement");
  }
}

// Highest-scoring phase of one node, ties to the lowest phase index.
int best_phase(const std::vector<std::vector<int>>& phases, const std::vector<double>& w,
               const std::vector<double>& s_hat, double* score_out) {
  int best = -1;
  double best_score = 0;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    double score = 0;
    for (int m : phases[k]) score += w[static_cast<std::size_t>(m)] * s_hat[static_cast<std::size_t>(m)];
    if (best < 0 || score > best_score) {
      best = static_cast<int>(k);
      best_score = score;
    }
  }
  if (score_out) *score_out = best_score;
  return best;
}

double phase_score(const std::vector<int>& phase, const std::vector<double>& w,
                   const std::vector<double>& s_hat) {
  double score = 0;
  for (int m : phase) score += w[static_cast<std::size_t>(m)] * s_hat[static_cast<std::size_t>(m)];
  return score;
}

// Queue-differential weights: own backlog minus ratio-weighted downstream
// backlog, using mean turning ratios.
std::vector<double> bp_weights(const Network& net, const std::vector<double>& x) {
  const auto M = static_cast<std::size_t>(net.num_movements());
  std::vector<double> w(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    w[m] = x[m];
    for (int j : net.downstream[m]) {
      w[m] -= net.routing[static_cast<std::size_t>(j)][m] * x[static_cast<std::size_t>(j)];
    }
  }
  return w;
}

// Queued vehicles pack into cells from the stop line, `lanes` per cell and
// one jam spacing of length each. Both sums run over the first n vehicles,
// capped at the link's storage; fractional counts add a scaled vehicle in the
// next cell so the sums stay continuous in n.
struct PackedLink {
  int lanes = 1;
  double length_m = 0;
  long cells = 0;  // cells inside the link
};

double cell_index_sum(long n, int lanes) {
  const long q = n / lanes;
  const long r = n % lanes;
  return static_cast<double>(lanes) * q * (q - 1) / 2.0 + static_cast<double>(r) * q;
}

// Sum of (distance to stop line scaled) weights d(v)/l: 1 at the stop line,
// shrinking toward the entrance.
double stop_line_sum(double n, const PackedLink& lk, double jam) {
  const double capacity = static_cast<double>(lk.cells) * lk.lanes;
  const double n1 = std::min(std::max(n, 0.0), capacity);
  const double k = std::floor(n1);
  const double frac = n1 - k;
  const auto ki = static_cast<long>(k);
  double sum = k - (jam / lk.length_m) * cell_index_sum(ki, lk.lanes);
  if (frac > 0 && ki < static_cast<long>(capacity)) {
    sum += frac * (1.0 - (jam / lk.length_m) * static_cast<double>(ki / lk.lanes));
  }
  return sum;
}

// Sum of (l - d)/l weights: 0 at the stop line, growing toward the entrance.
double entrance_sum(double n, const PackedLink& lk, double jam) {
  const double capacity = static_cast<double>(lk.cells) * lk.lanes;
  const double n1 = std::min(std::max(n, 0.0), capacity);
  const double k = std::floor(n1);
  const double frac = n1 - k;
  const auto ki = static_cast<long>(k);
  double sum = (jam / lk.length_m) * cell_index_sum(ki, lk.lanes);
  if (frac > 0 && ki < static_cast<long>(capacity)) {
    sum += frac * (jam / lk.length_m) * static_cast<double>(ki / lk.lanes);
  }
  return sum;
}

std::vector<PackedLink> origin_links(const Network& net, double jam) {
  if (!(jam > 0)) throw ConfigError("jam spacing must be positive");
  std::vector<PackedLink> out(static_cast<std::size_t>(net.num_movements()));
  for (std::size_t m = 0; m < out.size(); ++m) {
    const Link& lk = net.links[static_cast<std::size_t>(
        net.index_of_link(net.movements[m].origin_link))];
    out[m] = {lk.lanes, lk.length_m, static_cast<long>(lk.length_m / jam)};
  }
  return out;
}

// Position-weighted pressure: urgent (near) vehicles count more on the own
// link, while a filling downstream link pushes back through its tail.
std::vector<double> pwbp_weights(const Network& net, const std::vector<PackedLink>& links,
                                 double jam, const std::vector<double>& x) {
  const auto M = static_cast<std::size_t>(net.num_movements());
  std::vector<double> w(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    w[m] = stop_line_sum(x[m], links[m], jam);
    for (int j : net.downstream[m]) {
      const auto ju = static_cast<std::size_t>(j);
      w[m] -= net.routing[ju][m] * entrance_sum(x[ju], links[ju], jam);
    }
  }
  return w;
}

class BpController final : public Controller {
 public:
  BpController(const Network& net, BpOptions opts) : net_(net), opts_(opts) {}
  const char* name() const override { return "bp"; }
  std::vector<int> decide(const ControlInput& in, Rng&) override {
    check_input(net_, in, true);
    const std::vector<double> w = bp_weights(net_, in.queue);
    std::vector<int> phase(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (int n = 0; n < net_.num_nodes(); ++n) {
      double score = 0;
      const int k = best_phase(net_.phase_sets[static_cast<std::size_t>(n)].phases, w,
                               in.s_hat, &score);
      phase[static_cast<std::size_t>(n)] = (opts_.allow_all_red && score <= 0) ? -1 : k;
    }
    return phase;
  }

 private:
  const Network& net_;
  BpOptions opts_;
};

class PwbpController final : public Controller {
 public:
  PwbpController(const Network& net, PwbpOptions opts)
      : net_(net), opts_(opts), links_(origin_links(net, opts.jam_spacing_m)) {}
  const char* name() const override { return "pwbp"; }
  std::vector<int> decide(const ControlInput& in, Rng&) override {
    check_input(net_, in, true);
    const std::vector<double> w = pwbp_weights(net_, links_, opts_.jam_spacing_m, in.queue);
    std::vector<int> phase(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (int n = 0; n < net_.num_nodes(); ++n) {
      double score = 0;
      const int k = best_phase(net_.phase_sets[static_cast<std::size_t>(n)].phases, w,
                               in.s_hat, &score);
      phase[static_cast<std::size_t>(n)] = (opts_.allow_all_red && score <= 0) ? -1 : k;
    }
    return phase;
  }

 private:
  const Network& net_;
  PwbpOptions opts_;
  std::vector<PackedLink> links_;
};

class LescbpController final : public Controller {
 public:
  LescbpController(const Network& net, LescbpOptions opts)
      : net_(net), opts_(opts), links_(origin_links(net, opts.jam_spacing_m)) {
    if (opts.alpha < 0 || opts.beta < 0) {
      throw ConfigError("switching-cost parameters must be nonnegative");
    }
    reset();
  }
  const char* name() const override { return "lescbp"; }
  void reset() override { prev_.assign(static_cast<std::size_t>(net_.num_nodes()), -1); }
  std::vector<int> decide(const ControlInput& in, Rng&) override {
    check_input(net_, in, true);
    const std::vector<double> w = pwbp_weights(net_, links_, opts_.jam_spacing_m, in.queue);
    std::vector<int> phase(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (int n = 0; n < net_.num_nodes(); ++n) {
      const auto nu = static_cast<std::size_t>(n);
      const auto& phases = net_.phase_sets[nu].phases;
      double score = 0;
      const int k = best_phase(phases, w, in.s_hat, &score);
      if (k < 0) continue;
      int chosen = k;
      if (prev_[nu] >= 0 && prev_[nu] != k) {
        double norm = 0;
        for (int m : net_.movements_of_node[nu]) norm += in.queue[static_cast<std::size_t>(m)];
        const double cost = norm > 0 ? opts_.alpha * std::pow(norm, opts_.beta) : 0.0;
        const double held = phase_score(phases[static_cast<std::size_t>(prev_[nu])], w, in.s_hat);
        const double gain = score - (held + cost);
        const bool switch_now = opts_.hold_on_tie ? gain > 0 : gain >= 0;
        if (!switch_now) chosen = prev_[nu];
      }
      phase[nu] = chosen;
      prev_[nu] = chosen;
    }
    return phase;
  }

 private:
  const Network& net_;
  LescbpOptions opts_;
  std::vector<PackedLink> links_;
  std::vector<int> prev_;
};

class FixedController final : public Controller {
 public:
  FixedController(const Network& net, FixedPlan plan) : net_(net), plan_(std::move(plan)) {
    const auto N = static_cast<std::size_t>(net.num_nodes());
    if (plan_.per_node.size() != N) {
      throw ConfigError("fixed plan must list every node");
    }
    if (plan_.offset.empty()) plan_.offset.assign(N, 0);
    if (plan_.offset.size() != N) {
      throw ConfigError("fixed plan offsets must list every node");
    }
    cycle_.assign(N, 0);
    for (std::size_t n = 0; n < N; ++n) {
      const auto num_phases = static_cast<int>(net.phase_sets[n].phases.size());
      if (plan_.per_node[n].empty() && !net.movements_of_node[n].empty()) {
        throw ConfigError("fixed plan has no segments for a signalized node");
      }
      for (const FixedSegment& seg : plan_.per_node[n]) {
        if (seg.intervals < 1) throw ConfigError("fixed plan segment must span at least one interval");
        if (seg.phase < -1 || seg.phase >= num_phases) {
          throw ConfigError("fixed plan segment names an unknown phase");
        }
        cycle_[n] += seg.intervals;
      }
      if (plan_.offset[n] < 0) throw ConfigError("fixed plan offset must be nonnegative");
    }
  }
  const char* name() const override { return "fixed"; }
  std::vector<int> decide(const ControlInput& in, Rng&) override {
    check_input(net_, in, false);
    std::vector<int> phase(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (std::size_t n = 0; n < phase.size(); ++n) {
      if (cycle_[n] == 0) continue;
      long pos = (in.t + plan_.offset[n]) % cycle_[n];
      for (const FixedSegment& seg : plan_.per_node[n]) {
        if (pos < seg.intervals) {
          phase[n] = seg.phase;
          break;
        }
        pos -= seg.intervals;
      }
    }
    return phase;
  }

 private:
  const Network& net_;
  FixedPlan plan_;
  std::vector<long> cycle_;
};

class SfrOnlyController final : public Controller {
 public:
  SfrOnlyController(const Network& net, const SfrModel& model, const GreenSchedule& sched)
      : net_(net) {
    validate_sfr(model);
    const auto M = static_cast<std::size_t>(net.num_movements());
    if (model.per_movement.size() != M || sched.fallback.size() != M) {
      throw ConfigError("schedule does not match the network");
    }
    const auto values = enumerate_joint_values(model, nullptr);
    if (sched.per_joint.size() != values.size()) {
      throw ConfigError("schedule value count does not match the joint enumeration");
    }

    const auto N = static_cast<std::size_t>(net.num_nodes());
    value_mix_.resize(N);
    fallback_mix_.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      const auto& movs = net.movements_of_node[n];
      if (movs.empty()) continue;
      const auto local = enumerate_joint_values(model, &movs);
      // Local plan per revealed value: probability-weighted average of the
      // schedule over the joint values sharing that restriction. Service
      // rates at this node depend on the joint value only through the
      // restriction, so the averaged plan delivers the same capacity.
      std::vector<std::vector<double>> gbar(local.size(),
                                            std::vector<double>(movs.size(), 0.0));
      std::vector<double> mass(local.size(), 0.0);
      for (const auto& v : values) {
        const std::size_t z = restrict_joint_index(model, movs, v.index);
        mass[z] += v.prob;
        for (std::size_t j = 0; j < movs.size(); ++j) {
          gbar[z][j] += v.prob * sched.per_joint[v.index][static_cast<std::size_t>(movs[j])];
        }
      }
      std::vector<double> fb(movs.size(), 0.0);
      for (std::size_t j = 0; j < movs.size(); ++j) {
        fb[j] = sched.fallback[static_cast<std::size_t>(movs[j])];
      }
      for (std::size_t z = 0; z < local.size(); ++z) {
        if (mass[z] > 0) {
          for (double& gj : gbar[z]) gj /= mass[z];
        } else {
          gbar[z] = fb;  // unreachable value; any feasible plan works
        }
      }
      value_mix_[n].resize(local.size());
      for (std::size_t z = 0; z < local.size(); ++z) {
        value_mix_[n][z] = cumulative(decompose_green_ratios(net, static_cast<int>(n), gbar[z]).pi);
      }
      fallback_mix_[n] = cumulative(decompose_green_ratios(net, static_cast<int>(n), fb).pi);
    }
  }
  Info info() const override { return Info::NodeReveal; }
  const char* name() const override { return "sfronly"; }
  std::vector<int> decide(const ControlInput& in, Rng& rng) override {
    check_input(net_, in, false);
    if (!in.revealed.empty() &&
        in.revealed.size() != static_cast<std::size_t>(net_.num_nodes())) {
      throw SimError("revealed-value vector does not match the node count");
    }
    std::vector<int> phase(static_cast<std::size_t>(net_.num_nodes()), -1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t n = 0; n < phase.size(); ++n) {
      if (net_.movements_of_node[n].empty()) continue;
      const int z = in.revealed.empty() ? -1 : in.revealed[n];
      const std::vector<double>* cum = &fallback_mix_[n];
      if (z >= 0) {
        if (static_cast<std::size_t>(z) >= value_mix_[n].size()) {
          throw SimError("revealed value index out of range");
        }
        cum = &value_mix_[n][static_cast<std::size_t>(z)];
      }
      const double u = unit(rng);
      phase[n] = -1;  // mixture slack keeps the node red
      for (std::size_t k = 0; k < cum->size(); ++k) {
        if (u < (*cum)[k]) {
          phase[n] = static_cast<int>(k);
          break;
        }
      }
    }
    return phase;
  }

 private:
  static std::vector<double> cumulative(const std::vector<double>& pi) {
    std::vector<double> cum(pi.size(), 0.0);
    double acc = 0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
      acc += pi[k];
      cum[k] = acc;
    }
    return cum;
  }

  const Network& net_;
  std::vector<std::vector<std::vector<double>>> value_mix_;  // node -> value -> cum pi
  std::vector<std::vector<double>> fallback_mix_;
};

}  // namespace

std::unique_ptr<Controller> make_bp(const Network& net, BpOptions opts) {
  return std::make_unique<BpController>(net, opts);
}

std::unique_ptr<Controller> make_pwbp(const Network& net, PwbpOptions opts) {
  return std::make_unique<PwbpController>(net, opts);
}

std::unique_ptr<Controller> make_lescbp(const Network& net, LescbpOptions opts) {
  return std::make_unique<LescbpController>(net, opts);
}

std::unique_ptr<Controller> make_fixed(const Network& net, FixedPlan plan) {
  return std::make_unique<FixedController>(net, std::move(plan));
}

std::unique_ptr<Controller> make_sfr_only(const Network& net, const SfrModel& model,
                                          const GreenSchedule& schedule) {
  return std::make_unique<SfrOnlyController>(net, model, schedule);
}

GreenDecomposition decompose_green_ratios(const Network& net, int node_index,
                                          const std::vector<double>& g_node) {
  if (node_index < 0 || node_index >= net.num_nodes()) {
    throw ConfigError("decomposition node index out of range");
  }
  const auto& movs = net.movements_of_node[static_cast<std::size_t>(node_index)];
  if (g_node.size() != movs.size()) {
    throw ConfigError("green vector size does not match the node's movements");
  }
  const auto& phases = net.phase_sets[static_cast<std::size_t>(node_index)].phases;
  GreenDecomposition out;
  if (phases.empty()) {
    out.residual = 0;
    for (double g : g_node) out.residual += std::abs(g);
    return out;
  }

  const std::size_t K = phases.size();
  const std::size_t J = movs.size();
  std::vector<std::vector<double>> phi(K, std::vector<double>(J, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (int m : phases[k]) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(movs.begin(), movs.end(), m) - movs.begin());
      phi[k][pos] = 1.0;
    }
  }
  // Variables: pi_k then per-movement gap bounds t_j; the mixture must track
  // g within t on both sides, and total gap is minimized.
  LpProblem lp(K + J);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> up(K + J, 0.0), down(K + J, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      up[k] = phi[k][j];
      down[k] = -phi[k][j];
    }
    up[K + j] = -1.0;
    down[K + j] = -1.0;
    lp.add_row(std::move(up), g_node[j]);
    lp.add_row(std::move(down), -g_node[j]);
  }
  {
    std::vector<double> ones(K + J, 0.0);
    for (std::size_t k = 0; k < K; ++k) ones[k] = 1.0;
    lp.add_row(std::move(ones), 1.0);
  }
  for (std::size_t j = 0; j < J; ++j) lp.objective[K + j] = -1.0;

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw SimError("green-ratio decomposition did not reach an optimum");
  }
  out.pi.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(K));
  for (double& p : out.pi) p = std::min(1.0, std::max(0.0, p));
  out.residual = std::max(0.0, -sol.objective);
  return out;
}

}  // namespace stabreg
