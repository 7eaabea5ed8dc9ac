#include "cransim/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cransim::lp {

namespace {

// Dense tableau simplex. Column layout: [vars | slacks | artificials | rhs].
// Phase 1 minimizes the artificial sum; phase 2 maximizes the caller's
// objective. Dantzig pricing with a switch to Bland's rule late in the run to
// rule out cycling.
class Tableau {
 public:
  Tableau(const Problem& p, const Options& opts) : opts_(opts), n_vars_(p.num_vars) {
    const int n_ub = static_cast<int>(p.ub_rows.size());
    const int n_eq = static_cast<int>(p.eq_rows.size());
    rows_ = n_ub + n_eq;
    n_slack_ = n_ub;
    // Every row gets rhs >= 0 first; equality rows and flipped <= rows need
    // an artificial, plain <= rows start basic on their slack.
    struct RowSpec {
      const std::vector<double>* coeffs;
      double rhs;
      bool is_eq;
      int slack_index;  // -1 for equality rows
    };
    std::vector<RowSpec> specs;
    specs.reserve(rows_);
    for (int i = 0; i < n_ub; ++i) {
      specs.push_back({&p.ub_rows[i], p.ub_rhs[i], false, i});
    }
    for (int i = 0; i < n_eq; ++i) {
      specs.push_back({&p.eq_rows[i], p.eq_rhs[i], true, -1});
    }
    // Count artificials.
    n_art_ = 0;
    for (const auto& s : specs) {
      if (s.is_eq || s.rhs < 0.0) ++n_art_;
    }
    cols_ = n_vars_ + n_slack_ + n_art_ + 1;
    t_.assign(rows_, std::vector<double>(cols_, 0.0));
    basis_.assign(rows_, -1);

    int art = 0;
    for (int r = 0; r < rows_; ++r) {
      const auto& s = specs[r];
      if (static_cast<int>(s.coeffs->size()) != n_vars_) {
        throw std::invalid_argument("lp: row width does not match num_vars");
      }
      const double sign = s.rhs < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_vars_; ++j) t_[r][j] = sign * (*s.coeffs)[j];
      t_[r][cols_ - 1] = sign * s.rhs;
      if (s.slack_index >= 0) {
        t_[r][n_vars_ + s.slack_index] = sign;  // surplus when the row flipped
      }
      const bool needs_art = s.is_eq || sign < 0.0;
      if (needs_art) {
        const int aj = n_vars_ + n_slack_ + art++;
        t_[r][aj] = 1.0;
        basis_[r] = aj;
      } else {
        basis_[r] = n_vars_ + s.slack_index;
      }
    }
  }

  // Returns false when phase 1 ends with a positive artificial sum.
  bool phase1() {
    if (n_art_ == 0) return true;
    // Minimize the artificial sum: cost 1 on each artificial, reduced
    // against the starting basis (so basic columns price at zero and the
    // rhs cell carries minus the current objective).
    std::vector<double> cost(cols_, 0.0);
    for (int j = n_vars_ + n_slack_; j < cols_ - 1; ++j) cost[j] = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] >= n_vars_ + n_slack_) {
        for (int j = 0; j < cols_; ++j) cost[j] -= t_[r][j];
      }
    }
    run(cost, /*artificials_allowed=*/true);
    if (-cost[cols_ - 1] > opts_.tol) return false;  // residual infeasibility
    drive_out_artificials();
    return true;
  }

  void phase2(const std::vector<double>& objective) {
    std::vector<double> cost(cols_, 0.0);
    for (int j = 0; j < n_vars_ && j < static_cast<int>(objective.size()); ++j) {
      cost[j] = -objective[j];  // maximize c.x == minimize -c.x
    }
    // Make reduced costs consistent with the current basis.
    for (int r = 0; r < rows_; ++r) {
      const int b = basis_[r];
      if (b < cols_ - 1 && cost[b] != 0.0) {
        const double f = cost[b];
        for (int j = 0; j < cols_; ++j) cost[j] -= f * t_[r][j];
      }
    }
    run(cost, /*artificials_allowed=*/false);
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_vars_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < n_vars_) x[basis_[r]] = t_[r][cols_ - 1];
    }
    for (double& v : x) {
      if (v < 0.0 && v > -1e-9) v = 0.0;
    }
    return x;
  }

 private:
  void pivot(int pr, int pc) {
    auto& prow = t_[pr];
    const double pv = prow[pc];
    for (double& v : prow) v /= pv;
    prow[pc] = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = t_[r][pc];
      if (f == 0.0) continue;
      auto& row = t_[r];
      for (int j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  void run(std::vector<double>& cost, bool artificials_allowed) {
    const int jmax = n_vars_ + n_slack_ + (artificials_allowed ? n_art_ : 0);
    const int bland_after = std::max(5000, 20 * rows_);
    for (int it = 0; it < opts_.max_pivots; ++it) {
      const bool bland = it > bland_after;
      int pc = -1;
      double most = -opts_.tol;
      for (int j = 0; j < jmax; ++j) {
        if (cost[j] < most) {
          pc = j;
          if (bland) break;
          most = cost[j];
        }
      }
      if (pc < 0) return;  // optimal
      int pr = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < rows_; ++r) {
        const double a = t_[r][pc];
        if (a > opts_.pivot_tol) {
          const double ratio = t_[r][cols_ - 1] / a;
          if (pr < 0 || ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 && basis_[r] < basis_[pr])) {
            pr = r;
            best_ratio = ratio;
          }
        }
      }
      if (pr < 0) {
        // Unbounded direction; for feasibility use this cannot happen in
        // phase 1, and phase 2 objectives here are bounded. Stop cleanly.
        return;
      }
      pivot(pr, pc);
      const double f = cost[pc];
      if (f != 0.0) {
        const auto& prow = t_[pr];
        for (int j = 0; j < cols_; ++j) cost[j] -= f * prow[j];
        cost[pc] = 0.0;
      }
    }
    throw std::runtime_error("lp: pivot limit exceeded");
  }

  // After a successful phase 1, pivot any artificial still basic (at zero
  // level) out of the basis when a real column is available in its row.
  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < n_vars_ + n_slack_) continue;
      int pc = -1;
      for (int j = 0; j < n_vars_ + n_slack_; ++j) {
        if (std::abs(t_[r][j]) > opts_.pivot_tol) {
          pc = j;
          break;
        }
      }
      if (pc >= 0) pivot(r, pc);
      // Otherwise the row is all zeros in real columns: redundant constraint,
      // harmless to leave as is.
    }
  }

  Options opts_;
  int n_vars_ = 0;
  int n_slack_ = 0;
  int n_art_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<int> basis_;
};

}  // namespace

std::optional<std::vector<double>> solve(const Problem& problem, const Options& opts) {
  if (problem.num_vars <= 0) {
    throw std::invalid_argument("lp: num_vars must be positive");
  }
  if (problem.eq_rows.size() != problem.eq_rhs.size() ||
      problem.ub_rows.size() != problem.ub_rhs.size()) {
    throw std::invalid_argument("lp: row/rhs count mismatch");
  }
  Tableau tab(problem, opts);
  if (!tab.phase1()) return std::nullopt;
  if (!problem.objective.empty()) tab.phase2(problem.objective);
  return tab.solution();
}

}  // namespace cransim::lp
