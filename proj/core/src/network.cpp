#include "stabreg/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "stabreg/errors.hpp"

namespace stabreg {

namespace {

constexpr double kSingularTol = 1e-10;
constexpr double kRatioSumTol = 1e-12;

std::string msg(const std::string& where, const std::string& what) {
  return where + ": " + what;
}

// Maximal cliques of a small undirected graph, emitted in deterministic order.
void max_cliques(const std::vector<std::vector<char>>& adj, std::vector<int>& r,
                 std::vector<int> p, std::vector<int> x,
                 std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  while (!p.empty()) {
    int v = p.front();
    std::vector<int> p2, x2;
    for (int u : p)
      if (adj[v][u]) p2.push_back(u);
    for (int u : x)
      if (adj[v][u]) x2.push_back(u);
    r.push_back(v);
    max_cliques(adj, r, std::move(p2), std::move(x2), out);
    r.pop_back();
    p.erase(p.begin());
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

}  // namespace

int Network::index_of_movement(int movement_id) const {
  auto it = std::lower_bound(movements.begin(), movements.end(), movement_id,
                             [](const Movement& m, int id) { return m.id < id; });
  if (it == movements.end() || it->id != movement_id) return -1;
  return static_cast<int>(it - movements.begin());
}

int Network::index_of_node(int node_id) const {
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    if (node_ids[i] == node_id) return static_cast<int>(i);
  return -1;
}

int Network::index_of_link(int link_id) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].id == link_id) return static_cast<int>(i);
  return -1;
}

bool Network::boundary_movement(int m) const {
  return links[index_of_link(movements[m].origin_link)].from == 0;
}

Network build_network(const std::vector<int>& node_ids, std::vector<Link> links,
                      std::vector<Movement> movements,
                      const std::vector<std::pair<int, std::vector<std::vector<int>>>>& phases_by_node) {
  Network net;
  net.node_ids = node_ids;

  {
    std::set<int> seen;
    for (int id : node_ids) {
      if (id <= 0) throw ConfigError(msg("nodes", "node ids must be positive"));
      if (!seen.insert(id).second)
        throw ConfigError(msg("nodes", "duplicate node id " + std::to_string(id)));
    }
  }
  {
    std::set<int> seen;
    for (const Link& l : links) {
      if (l.id <= 0) throw ConfigError(msg("links", "link ids must be positive"));
      if (!seen.insert(l.id).second)
        throw ConfigError(msg("links", "duplicate link id " + std::to_string(l.id)));
      if (l.from == 0 && l.to == 0)
        throw ConfigError(msg("links[" + std::to_string(l.id) + "]", "detached from the network"));
      for (int end : {l.from, l.to})
        if (end != 0 && std::find(node_ids.begin(), node_ids.end(), end) == node_ids.end())
          throw ConfigError(msg("links[" + std::to_string(l.id) + "]",
                                "unknown node " + std::to_string(end)));
      if (l.length_m <= 0)
        throw ConfigError(msg("links[" + std::to_string(l.id) + "]", "length must be positive"));
      if (l.lanes <= 0)
        throw ConfigError(msg("links[" + std::to_string(l.id) + "]", "lanes must be positive"));
    }
  }
  net.links = std::move(links);

  std::sort(movements.begin(), movements.end(),
            [](const Movement& a, const Movement& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < movements.size(); ++i)
    if (movements[i].id == movements[i - 1].id)
      throw ConfigError(msg("movements", "duplicate movement id " + std::to_string(movements[i].id)));
  net.movements = std::move(movements);
  const int M = net.num_movements();
  if (M == 0) throw ConfigError(msg("movements", "at least one movement required"));

  for (const Movement& mv : net.movements) {
    std::string where = "movements[" + std::to_string(mv.id) + "]";
    if (net.index_of_node(mv.node) < 0)
      throw ConfigError(msg(where, "unknown node " + std::to_string(mv.node)));
    int oi = net.index_of_link(mv.origin_link);
    int di = net.index_of_link(mv.dest_link);
    if (oi < 0) throw ConfigError(msg(where, "unknown origin link"));
    if (di < 0) throw ConfigError(msg(where, "unknown dest link"));
    if (net.links[oi].to != mv.node)
      throw ConfigError(msg(where, "origin link does not end at the movement's node"));
    if (net.links[di].from != mv.node)
      throw ConfigError(msg(where, "dest link does not start at the movement's node"));
    if (mv.turn_ratio < 0 || mv.turn_ratio > 1)
      throw ConfigError(msg(where, "turning ratio outside [0, 1]"));
  }

  net.movements_of_link.assign(net.links.size(), {});
  for (int m = 0; m < M; ++m)
    net.movements_of_link[net.index_of_link(net.movements[m].origin_link)].push_back(m);
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    double sum = 0;
    for (int m : net.movements_of_link[l]) sum += net.movements[m].turn_ratio;
    if (sum > 1.0 + kRatioSumTol)
      throw ConfigError(msg("links[" + std::to_string(net.links[l].id) + "]",
                            "turning ratios of its movements sum above 1"));
  }

  net.upstream.assign(M, {});
  net.downstream.assign(M, {});
  for (int m = 0; m < M; ++m)
    for (int u = 0; u < M; ++u) {
      if (net.movements[u].dest_link == net.movements[m].origin_link) net.upstream[m].push_back(u);
      if (net.movements[u].origin_link == net.movements[m].dest_link) net.downstream[m].push_back(u);
    }
  net.routing.assign(M, std::vector<double>(M, 0.0));
  for (int m = 0; m < M; ++m)
    for (int u : net.upstream[m]) net.routing[m][u] = net.movements[m].turn_ratio;

  net.movements_of_node.assign(net.node_ids.size(), {});
  for (int m = 0; m < M; ++m)
    net.movements_of_node[net.index_of_node(net.movements[m].node)].push_back(m);

  net.phase_sets.assign(net.node_ids.size(), {});
  std::vector<char> have_phases(net.node_ids.size(), 0);
  for (const auto& [node_id, phase_lists] : phases_by_node) {
    int ni = net.index_of_node(node_id);
    if (ni < 0)
      throw ConfigError(msg("phases", "unknown node " + std::to_string(node_id)));
    if (have_phases[ni])
      throw ConfigError(msg("phases", "node " + std::to_string(node_id) + " listed twice"));
    have_phases[ni] = 1;
    PhaseSet ps;
    ps.node = node_id;
    for (const auto& phase : phase_lists) {
      std::vector<int> dense;
      for (int mid : phase) {
        int mi = net.index_of_movement(mid);
        if (mi < 0)
          throw ConfigError(msg("phases", "unknown movement " + std::to_string(mid)));
        if (net.movements[mi].node != node_id)
          throw ConfigError(msg("phases", "movement " + std::to_string(mid) +
                                              " does not belong to node " + std::to_string(node_id)));
        if (std::find(dense.begin(), dense.end(), mi) != dense.end())
          throw ConfigError(msg("phases", "movement " + std::to_string(mid) + " repeated in a phase"));
        dense.push_back(mi);
      }
      ps.phases.push_back(std::move(dense));
    }
    net.phase_sets[ni] = std::move(ps);
  }
  for (std::size_t ni = 0; ni < net.node_ids.size(); ++ni) {
    if (net.movements_of_node[ni].empty()) continue;
    if (!have_phases[ni] || net.phase_sets[ni].phases.empty())
      throw ConfigError(msg("phases", "empty phase set for node " + std::to_string(net.node_ids[ni])));
    net.phase_sets[ni].node = net.node_ids[ni];
  }

  // Conflict graph per node: two movements conflict when no phase lists both.
  // Feasible long-run green ratios satisfy one row per maximal clique.
  for (int ni = 0; ni < net.num_nodes(); ++ni) {
    const std::vector<int>& movs = net.movements_of_node[ni];
    const int k = static_cast<int>(movs.size());
    if (k == 0) continue;
    std::vector<std::vector<char>> conflict(k, std::vector<char>(k, 1));
    for (int a = 0; a < k; ++a) conflict[a][a] = 0;
    for (const auto& phase : net.phase_sets[ni].phases)
      for (std::size_t a = 0; a < phase.size(); ++a)
        for (std::size_t b = a + 1; b < phase.size(); ++b) {
          int ia = static_cast<int>(std::find(movs.begin(), movs.end(), phase[a]) - movs.begin());
          int ib = static_cast<int>(std::find(movs.begin(), movs.end(), phase[b]) - movs.begin());
          conflict[ia][ib] = conflict[ib][ia] = 0;
        }
    std::vector<int> r, p(k), x;
    for (int i = 0; i < k; ++i) p[i] = i;
    std::vector<std::vector<int>> cliques;
    max_cliques(conflict, r, std::move(p), std::move(x), cliques);
    for (auto& c : cliques) std::sort(c.begin(), c.end());
    std::sort(cliques.begin(), cliques.end());
    for (const auto& c : cliques) {
      Network::ConflictRow row;
      row.node_index = ni;
      for (int local : c) row.members.push_back(movs[local]);
      net.conflict_rows.push_back(std::move(row));
    }
  }

  // Build-time check that demand propagation converges; substochastic
  // columns plus an invertible I - R guarantee spectral radius below 1.
  demand_rates(net, std::vector<double>(M, 0.0));

  return net;
}

std::vector<double> demand_rates(const Network& net, const std::vector<double>& a) {
  const int M = net.num_movements();
  if (static_cast<int>(a.size()) != M)
    throw ConfigError("demand: expected " + std::to_string(M) + " rates, got " +
                      std::to_string(a.size()));
  for (double v : a)
    if (v < 0 || !std::isfinite(v)) throw ConfigError("demand: rates must be finite and nonnegative");

  // Solve (I - R) lambda = a by Gaussian elimination with partial pivoting.
  std::vector<std::vector<double>> A(M, std::vector<double>(M, 0.0));
  std::vector<double> b = a;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) A[i][j] = (i == j ? 1.0 : 0.0) - net.routing[i][j];
  }
  std::vector<int> perm(M);
  for (int i = 0; i < M; ++i) perm[i] = i;
  for (int col = 0; col < M; ++col) {
    int piv = col;
    for (int i = col + 1; i < M; ++i)
      if (std::fabs(A[i][col]) > std::fabs(A[piv][col])) piv = i;
    if (std::fabs(A[piv][col]) < kSingularTol)
      throw ConfigError("network: demand propagation is divergent (I - R singular)");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int i = col + 1; i < M; ++i) {
      double f = A[i][col] / A[col][col];
      if (f == 0.0) continue;
      for (int j = col; j < M; ++j) A[i][j] -= f * A[col][j];
      b[i] -= f * b[col];
    }
  }
  std::vector<double> lambda(M, 0.0);
  for (int i = M - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < M; ++j) s -= A[i][j] * lambda[j];
    lambda[i] = s / A[i][i];
  }
  return lambda;
}

Neighbors neighbors(const Network& net, int movement_index) {
  return Neighbors{net.upstream[movement_index], net.downstream[movement_index]};
}

}  // namespace stabreg
