#pragma once

// Small worked networks shared by the test suites, the acceptance runner,
// and the benchmarks.

#include <utility>
#include <vector>

#include "stabreg/network.hpp"
#include "stabreg/sfr.hpp"

namespace fx {

// Single intersection, two conflicting through movements, no turning.
inline stabreg::Network crossing() {
  std::vector<stabreg::Link> links{
      {1, 0, 1, 150.0, 1},
      {2, 0, 1, 150.0, 1},
      {3, 1, 0, 150.0, 1},
      {4, 1, 0, 150.0, 1},
  };
  std::vector<stabreg::Movement> movs{
      {1, 1, 1, 3, 0.0},
      {2, 1, 2, 4, 0.0},
  };
  return stabreg::build_network({1}, std::move(links), std::move(movs),
                                {{1, {{1}, {2}}}});
}

// Movement 1 serves 1 or 2 veh per interval w.p. (0.3, 0.7); movement 2 the
// same values w.p. (0.5, 0.5). Mean rates (1.7, 1.5).
inline stabreg::SfrModel crossing_sfr() {
  stabreg::SfrModel m;
  m.per_movement = {
      {{1.0, 2.0}, {0.3, 0.7}},
      {{1.0, 2.0}, {0.5, 0.5}},
  };
  return m;
}

// Two intersections joined by a pair of opposing links. Node 1 owns
// movements 1..4, node 2 owns 5..8; movements 1 and 3 feed the eastbound
// connector, 5 and 7 the westbound one, the rest exit the network.
inline stabreg::Network two_intersections() {
  std::vector<stabreg::Link> links{
      {101, 0, 1, 150.0, 1},
      {102, 0, 1, 150.0, 1},
      {103, 2, 1, 150.0, 1},
      {104, 1, 2, 150.0, 1},
      {105, 1, 0, 150.0, 1},
      {106, 1, 0, 150.0, 1},
      {201, 0, 2, 150.0, 1},
      {202, 0, 2, 150.0, 1},
      {203, 2, 0, 150.0, 1},
      {204, 2, 0, 150.0, 1},
  };
  std::vector<stabreg::Movement> movs{
      {1, 1, 101, 104, 0.0},
      {2, 1, 102, 105, 0.0},
      {3, 1, 103, 104, 0.25},
      {4, 1, 103, 106, 0.75},
      {5, 2, 201, 103, 0.0},
      {6, 2, 202, 203, 0.0},
      {7, 2, 104, 103, 0.2},
      {8, 2, 104, 204, 0.8},
  };
  return stabreg::build_network(
      {1, 2}, std::move(links), std::move(movs),
      {{1, {{1, 2}, {2, 3}, {3, 4}}}, {2, {{5, 6}, {6, 7}, {7, 8}}}});
}

// Every movement serves 3 or 4 veh per interval with equal probability.
inline stabreg::SfrModel two_intersections_sfr() {
  stabreg::SfrModel m;
  m.per_movement.assign(8, {{3.0, 4.0}, {0.5, 0.5}});
  return m;
}

inline std::vector<double> two_intersections_demand() {
  return {2.0, 1.0, 0.0, 0.0, 1.6, 1.0, 0.0, 0.0};
}

}  // namespace fx
