#include "stabreg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabreg/errors.hpp"

namespace stabreg {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kImproveEps = 1e-11;
constexpr long kMaxIters = 200000;

struct Tableau {
  std::size_t m = 0, ncols = 0;       // ncols includes the rhs cell
  std::vector<std::vector<double>> t; // m constraint rows
  std::vector<double> r;              // active reduced-cost row, rhs cell = -objective
  std::vector<std::size_t> basis;

  void pivot(std::size_t prow, std::size_t pcol) {
    std::vector<double>& pr = t[prow];
    double inv = 1.0 / pr[pcol];
    for (double& v : pr) v *= inv;
    pr[pcol] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == prow) continue;
      double f = t[i][pcol];
      if (std::fabs(f) <= 1e-13) continue;
      std::vector<double>& row = t[i];
      for (std::size_t j = 0; j < ncols; ++j) row[j] -= f * pr[j];
      row[pcol] = 0.0;
    }
    double f = r[pcol];
    if (std::fabs(f) > 1e-13) {
      for (std::size_t j = 0; j < ncols; ++j) r[j] -= f * pr[j];
      r[pcol] = 0.0;
    }
    basis[prow] = pcol;
  }
};

}  // namespace

void LpProblem::add_row(std::vector<double> a, double b) {
  a.resize(num_vars, 0.0);
  rows.push_back(std::move(a));
  rhs.push_back(b);
}

void LpProblem::mark_free(std::size_t var) {
  if (free_var.empty()) free_var.assign(num_vars, 0);
  free_var[var] = 1;
}

LpSolution solve_lp(const LpProblem& lp) {
  const std::size_t n0 = lp.num_vars;
  const std::size_t m = lp.rows.size();

  // Free variables are split into positive and negative parts.
  std::vector<std::size_t> neg_col(n0, static_cast<std::size_t>(-1));
  std::size_t nstruct = n0;
  if (!lp.free_var.empty()) {
    for (std::size_t j = 0; j < n0; ++j)
      if (lp.free_var[j]) neg_col[j] = nstruct++;
  }

  // Column layout: structural | one slack or surplus per row | artificials | rhs.
  std::vector<std::uint8_t> needs_art(m, 0);
  std::size_t nart = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (lp.rhs[i] < 0) needs_art[i] = 1, ++nart;

  Tableau tb;
  tb.m = m;
  const std::size_t slack0 = nstruct;
  const std::size_t art0 = nstruct + m;
  tb.ncols = nstruct + m + nart + 1;
  const std::size_t rhsc = tb.ncols - 1;
  tb.t.assign(m, std::vector<double>(tb.ncols, 0.0));
  tb.basis.assign(m, 0);

  {
    std::size_t art = art0;
    for (std::size_t i = 0; i < m; ++i) {
      double sign = needs_art[i] ? -1.0 : 1.0;  // negate rows with negative rhs
      std::vector<double>& row = tb.t[i];
      for (std::size_t j = 0; j < n0; ++j) {
        double v = lp.rows[i][j];
        if (v == 0.0) continue;
        row[j] = sign * v;
        if (neg_col[j] != static_cast<std::size_t>(-1)) row[neg_col[j]] = -sign * v;
      }
      row[slack0 + i] = sign;  // slack for <=, surplus after negation
      row[rhsc] = sign * lp.rhs[i];
      if (needs_art[i]) {
        row[art] = 1.0;
        tb.basis[i] = art++;
      } else {
        tb.basis[i] = slack0 + i;
      }
    }
  }

  auto run_phase = [&](bool phase1) -> LpStatus {
    const std::size_t limit = phase1 ? tb.ncols - 1 : art0;  // phase 2 never re-enters artificials
    bool bland = false;
    long since_improve = 0;
    const long stall_limit = static_cast<long>(std::max<std::size_t>(64, m));
    double best = tb.r[rhsc];
    for (long iter = 0; iter < kMaxIters; ++iter) {
      std::size_t enter = static_cast<std::size_t>(-1);
      if (bland) {
        for (std::size_t j = 0; j < limit; ++j)
          if (tb.r[j] < -kCostEps) { enter = j; break; }
      } else {
        double most = -kCostEps;
        for (std::size_t j = 0; j < limit; ++j)
          if (tb.r[j] < most) { most = tb.r[j]; enter = j; }
      }
      if (enter == static_cast<std::size_t>(-1)) return LpStatus::Optimal;

      std::size_t prow = static_cast<std::size_t>(-1);
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double a = tb.t[i][enter];
        if (a <= kPivotEps) continue;
        double ratio = tb.t[i][rhsc] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (prow == static_cast<std::size_t>(-1) ||
                                            tb.basis[i] < tb.basis[prow]))) {
          best_ratio = ratio;
          prow = i;
        }
      }
      if (prow == static_cast<std::size_t>(-1)) return LpStatus::Unbounded;

      tb.pivot(prow, enter);

      if (tb.r[rhsc] > best + kImproveEps) {
        best = tb.r[rhsc];
        since_improve = 0;
        bland = false;
      } else if (++since_improve > stall_limit) {
        bland = true;
      }
    }
    throw SimError("simplex hit its iteration cap");
  };

  if (nart > 0) {
    // Phase 1 minimizes the artificial sum; reduced costs priced out
    // against the initial artificial basis.
    tb.r.assign(tb.ncols, 0.0);
    for (std::size_t j = art0; j < rhsc; ++j) tb.r[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!needs_art[i]) continue;
      for (std::size_t j = 0; j < tb.ncols; ++j) tb.r[j] -= tb.t[i][j];
    }
    LpStatus st = run_phase(true);
    if (st == LpStatus::Unbounded) throw SimError("phase one cannot be unbounded");
    double art_sum = -tb.r[rhsc];
    if (art_sum > kFeasTol) {
      LpSolution sol;
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Degenerate artificials are pivoted out where a real column allows it;
    // rows that stay artificial are redundant and inert from here on.
    for (std::size_t i = 0; i < m; ++i) {
      if (tb.basis[i] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::fabs(tb.t[i][j]) > kPivotEps) {
          tb.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 minimizes -objective, priced out against the current basis.
  tb.r.assign(tb.ncols, 0.0);
  for (std::size_t j = 0; j < n0; ++j) {
    double c = lp.objective[j];
    if (c == 0.0) continue;
    tb.r[j] = -c;
    if (neg_col[j] != static_cast<std::size_t>(-1)) tb.r[neg_col[j]] = c;
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t b = tb.basis[i];
    double cb = b < rhsc ? tb.r[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < tb.ncols; ++j) tb.r[j] -= cb * tb.t[i][j];
    tb.r[b] = 0.0;
  }
  LpStatus st = run_phase(false);

  LpSolution sol;
  sol.status = st;
  if (st != LpStatus::Optimal) return sol;

  std::vector<double> ext(nstruct, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tb.basis[i] < nstruct) ext[tb.basis[i]] = tb.t[i][rhsc];
  sol.x.assign(n0, 0.0);
  for (std::size_t j = 0; j < n0; ++j) {
    sol.x[j] = ext[j];
    if (neg_col[j] != static_cast<std::size_t>(-1)) sol.x[j] -= ext[neg_col[j]];
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n0; ++j) sol.objective += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace stabreg
