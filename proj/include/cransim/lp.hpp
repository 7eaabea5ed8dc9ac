#pragma once

#include <optional>
#include <vector>

namespace cransim::lp {

// Dense linear program over variables x >= 0:
//   eq_rows * x == eq_rhs,  ub_rows * x <= ub_rhs,
// optionally maximizing objective . x. The design module only needs modest
// sizes (hundreds of rows/columns), so a dense two-phase simplex is plenty.
struct Problem {
  int num_vars = 0;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<double> objective;  // empty: pure feasibility
};

struct Options {
  double tol = 1e-9;       // feasibility tolerance on the phase-1 objective
  double pivot_tol = 1e-11;
  int max_pivots = 200000;
};

// Returns a feasible point (phase-2 optimal when an objective is given), or
// nullopt when the constraints are inconsistent.
std::optional<std::vector<double>> solve(const Problem& problem, const Options& opts = {});

}  // namespace cransim::lp
