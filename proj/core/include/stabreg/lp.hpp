#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stabreg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize objective . x  subject to  rows[i] . x <= rhs[i],
// with x >= 0 except for variables flagged free.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<std::uint8_t> free_var;  // empty means all variables nonnegative

  explicit LpProblem(std::size_t n) : num_vars(n), objective(n, 0.0) {}
  void add_row(std::vector<double> a, double b);
  void mark_free(std::size_t var);
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // empty unless status == Optimal
};

// Dense two-phase primal simplex. Entering variable by largest reduced cost;
// on a degenerate stall the rule drops to lowest-index selection until the
// objective moves again, so cycling cannot occur. Leaving-row ties always
// break on the lowest basis index.
LpSolution solve_lp(const LpProblem& lp);

}  // namespace stabreg
