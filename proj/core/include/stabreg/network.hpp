#pragma once

#include <string>
#include <vector>

namespace stabreg {

// Node and link ids are user-chosen positive integers; node id 0 stands for
// the outside world on link endpoints.
struct Link {
  int id = 0;
  int from = 0;
  int to = 0;
  double length_m = 0;
  int lanes = 1;
};

struct Movement {
  int id = 0;
  int node = 0;        // node id where the movement is controlled
  int origin_link = 0;
  int dest_link = 0;
  double turn_ratio = 0;  // share of upstream discharge that joins this movement
};

struct PhaseSet {
  int node = 0;
  std::vector<std::vector<int>> phases;  // dense movement indices per phase
};

struct Network {
  std::vector<int> node_ids;
  std::vector<Link> links;
  std::vector<Movement> movements;   // sorted by id; positions are dense indices
  std::vector<PhaseSet> phase_sets;  // aligned with node_ids

  std::vector<std::vector<int>> upstream;    // U(m): movements ending on m's origin link
  std::vector<std::vector<int>> downstream;  // O(m): movements leaving m's dest link
  std::vector<std::vector<double>> routing;  // R[m][u] = turn_ratio(m) for u in U(m)

  // Green-ratio feasibility rows: one per maximal clique of each node's
  // conflict graph, sum of member ratios <= 1. Nonnegativity is implicit.
  struct ConflictRow {
    int node_index = 0;
    std::vector<int> members;  // dense movement indices
  };
  std::vector<ConflictRow> conflict_rows;

  std::vector<std::vector<int>> movements_of_node;  // dense node idx -> movement idxs
  std::vector<std::vector<int>> movements_of_link;  // link idx -> movement idxs with that origin

  int num_movements() const { return static_cast<int>(movements.size()); }
  int num_nodes() const { return static_cast<int>(node_ids.size()); }
  int index_of_movement(int movement_id) const;  // -1 when absent
  int index_of_node(int node_id) const;
  int index_of_link(int link_id) const;
  bool boundary_movement(int m) const;  // origin link comes from outside
};

struct Neighbors {
  const std::vector<int>& upstream;
  const std::vector<int>& downstream;
};

// Validates and cross-links a parsed document; throws ConfigError with the
// offending field on inconsistency.
Network build_network(const std::vector<int>& node_ids, std::vector<Link> links,
                      std::vector<Movement> movements,
                      const std::vector<std::pair<int, std::vector<std::vector<int>>>>& phases_by_node);

// Long-run movement demand: lambda = (I - R)^-1 a.
std::vector<double> demand_rates(const Network& net, const std::vector<double>& a);

Neighbors neighbors(const Network& net, int movement_index);

}  // namespace stabreg
