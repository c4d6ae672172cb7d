#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "stabreg/lp.hpp"
#include "stabreg/network.hpp"
#include "stabreg/sfr.hpp"

namespace stabreg {

// A state-conditioned service plan: one green-ratio vector per joint service
// rate value (aligned with enumerate_joint_values over the whole model) plus
// the fallback used when rates are not revealed. The fallback is the
// probability mix of the conditioned plans, matching a controller that
// answers a failed prediction by guessing a value and applying its plan.
// Every vector satisfies the network's conflict rows.
struct GreenSchedule {
  double theta = 0;
  std::vector<std::vector<double>> per_joint;
  std::vector<double> fallback;
};

// Long-run service capacity per movement delivered by a schedule:
// theta-weighted mix of the conditioned plans and the fallback plan.
std::vector<double> capacity_of_schedule(const Network& net, const SfrModel& model,
                                         const GreenSchedule& sched,
                                         std::size_t cap = kJointCap);

struct ReserveResult {
  double eps_max = 0;  // largest uniform demand increment that stays servable
  GreenSchedule schedule;
  LpStatus status = LpStatus::Infeasible;
};

// Maximizes the uniform exogenous reserve epsilon subject to capacity covering
// propagated demand and all green-ratio vectors staying feasible. The returned
// schedule attains eps_max and is realizable as per-node phase mixtures.
ReserveResult reserve_demand(const Network& net, const SfrModel& model,
                             const std::vector<double>& a, double theta,
                             std::size_t cap = kJointCap);

// Componentwise >= with at least one strict coordinate.
bool dominates(const std::vector<double>& p, const std::vector<double>& q);

enum class FrontierKind {
  Precise,  // no feasible point dominates it
  General,  // uniform growth in all coordinates immediately leaves the region
};

struct FrontierCheck {
  bool feasible = false;
  bool on_frontier = false;
};

// `point` is an exogenous demand vector. Infeasible points report
// {false, false}, distinct from feasible points off the frontier.
FrontierCheck frontier_membership(const Network& net, const SfrModel& model,
                                  const std::vector<double>& point, double theta,
                                  FrontierKind kind, std::size_t cap = kJointCap);

struct Region2D {
  std::vector<std::array<double, 2>> vertices;  // convex, counterclockwise
  double area = 0;
};

// Stability region of a two-movement network as a polygon: frontier points
// from a direction sweep plus the axis intercepts and the origin.
Region2D region_hull_2d(const Network& net, const SfrModel& model, double theta,
                        int n_dirs = 64, std::size_t cap = kJointCap);

namespace detail {
// Reference reserve formulation carrying one green block per full joint value.
// Algebraically equivalent to reserve_demand; kept small-scale for cross
// checks because its tableau grows with the full enumeration.
ReserveResult reserve_demand_full(const Network& net, const SfrModel& model,
                                  const std::vector<double>& a, double theta,
                                  std::size_t cap = kJointCap);
}  // namespace detail

}  // namespace stabreg
