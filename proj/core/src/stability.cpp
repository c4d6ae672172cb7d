#include "stabreg/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>

#include "stabreg/errors.hpp"

namespace stabreg {

namespace {

constexpr double kZeroTol = 1e-6;

// Variable layout for the capacity side of every stability LP. Green ratios
// are factored per node: a movement's service rate depends on the joint value
// only through the rates at its own node, so conditioning plans on the node's
// local value loses no capacity and keeps the tableau small.
struct NodeBlock {
  int node_index = 0;
  std::vector<int> movs;              // dense movement indices, ascending
  std::vector<JointValue> values;     // local enumeration, first mov fastest
  std::size_t var_base = 0;           // values.size() * movs.size() green vars
};

struct CapacityVars {
  double theta = 0;
  std::vector<NodeBlock> blocks;
  std::size_t num_vars = 0;
  // capacity linear form per movement as (variable, coefficient) pairs
  std::vector<std::vector<std::pair<std::size_t, double>>> cap;
};

std::size_t block_var(const NodeBlock& b, std::size_t value, std::size_t pos) {
  return b.var_base + value * b.movs.size() + pos;
}

CapacityVars build_capacity_vars(const Network& net, const SfrModel& model,
                                 double theta, std::size_t cap_limit) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ConfigError("information ability must lie in [0, 1]");
  }
  if (model.per_movement.size() != net.num_movements()) {
    throw ConfigError("service model size does not match the network");
  }
  validate_sfr(model);
  // Guard the full enumeration bound up front even though the LP never
  // materializes it; schedules are reported per global joint value.
  enumerate_joint_values(model, nullptr, cap_limit);

  CapacityVars cv;
  cv.theta = theta;
  std::size_t next = 0;
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const auto& movs = net.movements_of_node[n];
    if (movs.empty()) continue;
    NodeBlock b;
    b.node_index = static_cast<int>(n);
    b.movs = movs;
    b.values = enumerate_joint_values(model, &b.movs, cap_limit);
    b.var_base = next;
    next += b.values.size() * b.movs.size();
    cv.blocks.push_back(std::move(b));
  }
  cv.num_vars = next;

  // A failed prediction is answered by guessing a value from the historical
  // distribution and applying that value's plan, so the guess branch serves
  // s-bar times the probability mix of the conditioned plans. Folding the mix
  // into the per-value coefficients ties the two branches together.
  const std::vector<double> sbar = mean_sfr(model);
  cv.cap.assign(net.num_movements(), {});
  for (const auto& b : cv.blocks) {
    for (std::size_t pos = 0; pos < b.movs.size(); ++pos) {
      const auto m = static_cast<std::size_t>(b.movs[pos]);
      for (std::size_t v = 0; v < b.values.size(); ++v) {
        const double coef =
            b.values[v].prob * (theta * b.values[v].s[m] + (1.0 - theta) * sbar[m]);
        if (coef != 0.0) cv.cap[m].emplace_back(block_var(b, v, pos), coef);
      }
    }
  }
  return cv;
}

// One conflict row per clique per conditioned plan. The guess-branch plan is
// a convex mix of these, so it needs no rows of its own.
void add_conflict_rows(LpProblem& lp, const Network& net, const CapacityVars& cv) {
  for (const auto& b : cv.blocks) {
    for (std::size_t v = 0; v < b.values.size(); ++v) {
      for (const auto& row : net.conflict_rows) {
        if (row.node_index != b.node_index) continue;
        std::vector<double> coefs(lp.num_vars, 0.0);
        for (int m : row.members) {
          const auto pos = static_cast<std::size_t>(
              std::lower_bound(b.movs.begin(), b.movs.end(), m) - b.movs.begin());
          coefs[block_var(b, v, pos)] = 1.0;
        }
        lp.add_row(std::move(coefs), 1.0);
      }
    }
  }
}

std::vector<double> clamp_unit(std::vector<double> g) {
  for (double& v : g) v = std::min(1.0, std::max(0.0, v));
  return g;
}

// Replace a per-node green vector by the cheapest phase mixture covering it.
// LP optima can sit outside the span of the listed phases while still
// respecting the clique rows; covering from above keeps capacity and makes
// the plan realizable by sampling phases. Infeasible targets (possible only
// with non-maximal phase lists) are left unchanged.
std::vector<double> cover_with_phases(const Network& net, int node_index,
                                      const std::vector<int>& movs,
                                      const std::vector<double>& g) {
  const auto& phases = net.phase_sets[static_cast<std::size_t>(node_index)].phases;
  if (phases.empty()) return g;
  const std::size_t K = phases.size();
  LpProblem lp(K);
  std::vector<std::vector<double>> phi(K, std::vector<double>(movs.size(), 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (int m : phases[k]) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(movs.begin(), movs.end(), m) - movs.begin());
      phi[k][pos] = 1.0;
    }
  }
  for (std::size_t j = 0; j < movs.size(); ++j) {
    std::vector<double> row(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) row[k] = -phi[k][j];
    lp.add_row(std::move(row), -g[j]);
  }
  lp.add_row(std::vector<double>(K, 1.0), 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    lp.objective[k] = -std::accumulate(phi[k].begin(), phi[k].end(), 0.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return g;
  std::vector<double> out(movs.size(), 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < movs.size(); ++j) out[j] += sol.x[k] * phi[k][j];
  }
  return clamp_unit(std::move(out));
}

// Pull the green variables out of an LP solution and assemble the reported
// schedule: per-node plans covered by phase mixtures, then expanded to one
// vector per full joint value through the node restriction of its index.
GreenSchedule extract_schedule(const Network& net, const SfrModel& model,
                               const CapacityVars& cv, const std::vector<double>& x,
                               std::size_t cap_limit) {
  const std::size_t M = net.num_movements();
  std::vector<std::vector<std::vector<double>>> node_g(cv.blocks.size());
  for (std::size_t bi = 0; bi < cv.blocks.size(); ++bi) {
    const auto& b = cv.blocks[bi];
    node_g[bi].resize(b.values.size());
    for (std::size_t v = 0; v < b.values.size(); ++v) {
      std::vector<double> g(b.movs.size(), 0.0);
      for (std::size_t pos = 0; pos < b.movs.size(); ++pos) {
        g[pos] = x[block_var(b, v, pos)];
      }
      node_g[bi][v] = cover_with_phases(net, b.node_index, b.movs, clamp_unit(std::move(g)));
    }
  }
  // The guess-branch plan is the probability mix of the conditioned plans; a
  // mix of phase mixtures needs no further covering.
  std::vector<std::vector<double>> fb_node(cv.blocks.size());
  for (std::size_t bi = 0; bi < cv.blocks.size(); ++bi) {
    const auto& b = cv.blocks[bi];
    std::vector<double> mix(b.movs.size(), 0.0);
    for (std::size_t v = 0; v < b.values.size(); ++v) {
      for (std::size_t j = 0; j < b.movs.size(); ++j) {
        mix[j] += b.values[v].prob * node_g[bi][v][j];
      }
    }
    fb_node[bi] = clamp_unit(std::move(mix));
  }

  // With no information the split across values is arbitrary; canonicalize to
  // the mix so the reported plans are state independent.
  if (cv.theta == 0.0) {
    for (std::size_t bi = 0; bi < cv.blocks.size(); ++bi) {
      for (auto& g : node_g[bi]) g = fb_node[bi];
    }
  }

  GreenSchedule sched;
  sched.theta = cv.theta;
  sched.fallback.assign(M, 0.0);
  for (std::size_t bi = 0; bi < cv.blocks.size(); ++bi) {
    const auto& b = cv.blocks[bi];
    for (std::size_t pos = 0; pos < b.movs.size(); ++pos) {
      sched.fallback[static_cast<std::size_t>(b.movs[pos])] = fb_node[bi][pos];
    }
  }

  std::vector<std::size_t> sizes(M), strides(M);
  std::size_t total = 1;
  for (std::size_t m = 0; m < M; ++m) {
    sizes[m] = model.per_movement[m].support.size();
    strides[m] = total;
    total *= sizes[m];
  }
  sched.per_joint.assign(total, std::vector<double>(M, 0.0));
  for (std::size_t e = 0; e < total; ++e) {
    auto& g = sched.per_joint[e];
    for (std::size_t bi = 0; bi < cv.blocks.size(); ++bi) {
      const auto& b = cv.blocks[bi];
      std::size_t local = 0;
      std::size_t local_stride = 1;
      for (std::size_t pos = 0; pos < b.movs.size(); ++pos) {
        const auto m = static_cast<std::size_t>(b.movs[pos]);
        local += ((e / strides[m]) % sizes[m]) * local_stride;
        local_stride *= sizes[m];
      }
      for (std::size_t pos = 0; pos < b.movs.size(); ++pos) {
        g[static_cast<std::size_t>(b.movs[pos])] = node_g[bi][local][pos];
      }
    }
  }
  (void)cap_limit;
  return sched;
}

ReserveResult solve_reserve(const Network& net, const SfrModel& model,
                            const std::vector<double>& a, double theta,
                            std::size_t cap_limit) {
  const std::size_t M = net.num_movements();
  const std::vector<double> lambda = demand_rates(net, a);
  const std::vector<double> u = demand_rates(net, std::vector<double>(M, 1.0));

  CapacityVars cv = build_capacity_vars(net, model, theta, cap_limit);
  const std::size_t eps_var = cv.num_vars;
  LpProblem lp(cv.num_vars + 1);
  lp.mark_free(eps_var);
  lp.objective[eps_var] = 1.0;
  add_conflict_rows(lp, net, cv);
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<double> row(lp.num_vars, 0.0);
    row[eps_var] = u[m];
    for (const auto& [var, coef] : cv.cap[m]) row[var] -= coef;
    lp.add_row(std::move(row), -lambda[m]);
  }

  const LpSolution sol = solve_lp(lp);
  ReserveResult res;
  res.status = sol.status;
  if (sol.status != LpStatus::Optimal) {
    // The reserve LP always admits eps << 0 with an all-red plan and its
    // objective is bounded by finite capacity, so this is a solver defect.
    throw SimError("reserve program did not reach an optimum");
  }
  res.eps_max = sol.x[eps_var];
  res.schedule = extract_schedule(net, model, cv, sol.x, cap_limit);
  return res;
}

}  // namespace

std::vector<double> capacity_of_schedule(const Network& net, const SfrModel& model,
                                         const GreenSchedule& sched,
                                         std::size_t cap) {
  const std::size_t M = net.num_movements();
  validate_sfr(model);
  if (model.per_movement.size() != M) {
    throw ConfigError("service model size does not match the network");
  }
  const auto values = enumerate_joint_values(model, nullptr, cap);
  if (sched.per_joint.size() != values.size()) {
    throw ConfigError("schedule value count does not match the joint enumeration");
  }
  if (sched.fallback.size() != M) {
    throw ConfigError("schedule fallback size does not match the network");
  }
  const std::vector<double> sbar = mean_sfr(model);
  std::vector<double> c(M, 0.0);
  for (std::size_t e = 0; e < values.size(); ++e) {
    if (sched.per_joint[e].size() != M) {
      throw ConfigError("schedule green vector size does not match the network");
    }
    for (std::size_t m = 0; m < M; ++m) {
      c[m] += sched.theta * values[e].prob * values[e].s[m] * sched.per_joint[e][m];
    }
  }
  for (std::size_t m = 0; m < M; ++m) {
    c[m] += (1.0 - sched.theta) * sbar[m] * sched.fallback[m];
  }
  return c;
}

ReserveResult reserve_demand(const Network& net, const SfrModel& model,
                             const std::vector<double>& a, double theta,
                             std::size_t cap) {
  return solve_reserve(net, model, a, theta, cap);
}

bool dominates(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw ConfigError("dominance comparison needs vectors of equal size");
  }
  bool strict = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < q[i]) return false;
    if (p[i] > q[i]) strict = true;
  }
  return strict;
}

FrontierCheck frontier_membership(const Network& net, const SfrModel& model,
                                  const std::vector<double>& point, double theta,
                                  FrontierKind kind, std::size_t cap) {
  FrontierCheck out;
  if (kind == FrontierKind::General) {
    const ReserveResult rr = solve_reserve(net, model, point, theta, cap);
    out.feasible = rr.eps_max >= -kZeroTol;
    out.on_frontier = out.feasible && rr.eps_max <= kZeroTol;
    return out;
  }

  // Precise frontier: maximize total componentwise slack above the point.
  // Zero optimum means no feasible vector dominates it.
  const std::size_t M = net.num_movements();
  const std::vector<double> lambda = demand_rates(net, point);
  CapacityVars cv = build_capacity_vars(net, model, theta, cap);
  LpProblem lp(cv.num_vars + M);
  add_conflict_rows(lp, net, cv);
  for (std::size_t m = 0; m < M; ++m) {
    lp.objective[cv.num_vars + m] = 1.0;
    std::vector<double> row(lp.num_vars, 0.0);
    row[cv.num_vars + m] = 1.0;
    for (const auto& [var, coef] : cv.cap[m]) row[var] -= coef;
    lp.add_row(std::move(row), -lambda[m]);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return out;
  if (sol.status != LpStatus::Optimal) {
    throw SimError("frontier program did not reach an optimum");
  }
  out.feasible = true;
  out.on_frontier = sol.objective <= kZeroTol;
  return out;
}

Region2D region_hull_2d(const Network& net, const SfrModel& model, double theta,
                        int n_dirs, std::size_t cap) {
  if (net.num_movements() != 2) {
    throw ConfigError("region sweep needs a two-movement network");
  }
  if (n_dirs < 1) {
    throw ConfigError("region sweep needs at least one direction");
  }

  CapacityVars cv = build_capacity_vars(net, model, theta, cap);
  // Frontier point along direction d: maximize d . c(g) over feasible plans,
  // then read the capacity vector off the optimizer. Axis directions yield
  // the intercepts; interior directions trace the curved part of the hull.
  const auto support_point = [&](double dx, double dy) {
    LpProblem lp(cv.num_vars);
    add_conflict_rows(lp, net, cv);
    const double d[2] = {dx, dy};
    for (std::size_t m = 0; m < 2; ++m) {
      for (const auto& [var, coef] : cv.cap[m]) lp.objective[var] += d[m] * coef;
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      throw SimError("region support program did not reach an optimum");
    }
    std::array<double, 2> c = {0.0, 0.0};
    for (std::size_t m = 0; m < 2; ++m) {
      for (const auto& [var, coef] : cv.cap[m]) c[m] += coef * sol.x[var];
    }
    return c;
  };

  std::vector<std::array<double, 2>> pts;
  pts.push_back({0.0, 0.0});
  const auto xcap = support_point(1.0, 0.0);
  const auto ycap = support_point(0.0, 1.0);
  pts.push_back({xcap[0], 0.0});
  pts.push_back({0.0, ycap[1]});
  constexpr double kPi = 3.14159265358979323846;
  for (int k = 1; k <= n_dirs; ++k) {
    const double ang = (kPi / 2.0) * static_cast<double>(k) / (n_dirs + 1);
    pts.push_back(support_point(std::cos(ang), std::sin(ang)));
  }

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& p, const auto& q) {
                          return std::abs(p[0] - q[0]) <= 1e-9 &&
                                 std::abs(p[1] - q[1]) <= 1e-9;
                        }),
            pts.end());
  if (pts.size() < 3) {
    throw SimError("region collapsed to fewer than three distinct points");
  }

  const auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& p,
                        const std::array<double, 2>& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 1e-12) --h;
    hull[h++] = p;
  }
  const std::size_t lower = h + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], *it) <= 1e-12) --h;
    hull[h++] = *it;
  }
  hull.resize(h - 1);  // last point repeats the first

  Region2D region;
  region.vertices = std::move(hull);
  if (region.vertices.size() < 3) {
    throw SimError("region collapsed to fewer than three distinct points");
  }
  double area2 = 0;
  for (std::size_t i = 0; i < region.vertices.size(); ++i) {
    const auto& p = region.vertices[i];
    const auto& q = region.vertices[(i + 1) % region.vertices.size()];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  region.area = 0.5 * std::abs(area2);
  return region;
}

namespace detail {

ReserveResult reserve_demand_full(const Network& net, const SfrModel& model,
                                  const std::vector<double>& a, double theta,
                                  std::size_t cap) {
  const std::size_t M = net.num_movements();
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ConfigError("information ability must lie in [0, 1]");
  }
  const std::vector<double> lambda = demand_rates(net, a);
  const std::vector<double> u = demand_rates(net, std::vector<double>(M, 1.0));
  const auto values = enumerate_joint_values(model, nullptr, cap);
  const std::vector<double> sbar = mean_sfr(model);

  const std::size_t E = values.size();
  const std::size_t eps_var = E * M;
  LpProblem lp(eps_var + 1);
  lp.mark_free(eps_var);
  lp.objective[eps_var] = 1.0;
  for (std::size_t e = 0; e < E; ++e) {
    for (const auto& row : net.conflict_rows) {
      std::vector<double> coefs(lp.num_vars, 0.0);
      for (int m : row.members) coefs[e * M + static_cast<std::size_t>(m)] = 1.0;
      lp.add_row(std::move(coefs), 1.0);
    }
  }
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<double> row(lp.num_vars, 0.0);
    row[eps_var] = u[m];
    for (std::size_t e = 0; e < E; ++e) {
      // revealed branch plus the guess branch drawing this value's plan
      row[e * M + m] -=
          values[e].prob * (theta * values[e].s[m] + (1.0 - theta) * sbar[m]);
    }
    lp.add_row(std::move(row), -lambda[m]);
  }

  const LpSolution sol = solve_lp(lp);
  ReserveResult res;
  res.status = sol.status;
  if (sol.status != LpStatus::Optimal) {
    throw SimError("reserve program did not reach an optimum");
  }
  res.eps_max = sol.x[eps_var];
  res.schedule.theta = theta;
  res.schedule.per_joint.assign(E, std::vector<double>(M, 0.0));
  res.schedule.fallback.assign(M, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t m = 0; m < M; ++m) {
      res.schedule.per_joint[e][m] = sol.x[e * M + m];
      res.schedule.fallback[m] += values[e].prob * sol.x[e * M + m];
    }
  }
  return res;
}

}  // namespace detail

}  // namespace stabreg
