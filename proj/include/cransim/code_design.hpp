#pragma once

#include <optional>
#include <string>

#include "cransim/ensemble.hpp"

namespace cransim {

// Check-regular ensemble design problem: find lambda (variable side) for a
// fixed check degree and target rate. The two equality constraints are
//   sum lambda_i = 1,  sum lambda_i / i = 1 / (d_c (1 - R)),
// and convergence at a candidate eps0 is imposed on a uniform x-grid over
// [eps_thresh, eps0], where it is linear in lambda:
//   eps0 * sum_i lambda_i (1 - (1-x)^(d_c-1))^(i-1) <= x - margin.
struct DesignProblem {
  double target_rate = 0.5;
  int d_c = 7;
  int d_max = 200;
  bool forbid_degree_one = true;
  int x_grid_points = 500;
  double eps_thresh = 1e-3;
  double margin = 1e-9;

  double mean_inv_degree() const;  // 1 / (d_c (1 - R))
  // Largest design rate whose mean-degree constraint is attainable given the
  // degree-one policy (all edge mass on degree 2, or degree 1 when allowed).
  double max_attainable_rate() const;
  bool rate_attainable() const;
  // Same problem with target_rate clamped into the attainable range.
  DesignProblem clamped_to_attainable() const;

  void validate() const;  // throws std::invalid_argument on contradictions
};

// Solves the linear feasibility problem at fixed eps0. Returns a satisfying
// distribution or nullopt when infeasible. Throws when the rate/mean-degree
// equalities alone are contradictory. The LP objective pushes the convergence
// rows to bind, so the returned ensemble's threshold sits essentially at eps0.
std::optional<DegreeDistribution> feasible_at(const DesignProblem& problem, double eps0);

// Maximizes the threshold by bisecting eps0 over (0, 1 - R] down to a 1e-4
// bracket. The returned CodeSpec carries the threshold recomputed analytically
// from the final distribution, cross-checked against the bisection value.
CodeSpec optimize(const DesignProblem& problem, const std::string& label = "");

// Designs an ensemble achieving a requested threshold: one feasibility solve
// at eps_target, recompute, and cross-check within kRecomputeTol.
CodeSpec design_to_threshold(const DesignProblem& problem, double eps_target,
                             const std::string& label = "");

inline constexpr double kRecomputeTol = 5e-3;

// The canonical eight-code d_c = 7 palette shipped with the library: one code
// per standard rate, each constructed to its reference operating threshold.
// Rates above the attainable maximum 1 - 2/d_c clamp to it.
CodePalette build_standard_palette();

}  // namespace cransim
