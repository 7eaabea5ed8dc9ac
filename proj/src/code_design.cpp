#include "cransim/code_design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cransim/density_evolution.hpp"
#include "cransim/lp.hpp"

namespace cransim {

namespace {

int min_degree(const DesignProblem& p) { return p.forbid_degree_one ? 2 : 1; }

std::string default_label(double rate, int d_c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "R=%.6g dc=%d", rate, d_c);
  return buf;
}

DegreeDistribution to_distribution(const DesignProblem& p, const std::vector<double>& x) {
  DegreeDistribution::Coeffs lambda;
  const int lo = min_degree(p);
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    double v = x[i];
    if (v < 1e-12) continue;  // simplex noise
    lambda[lo + i] = std::min(v, 1.0);
  }
  return DegreeDistribution(std::move(lambda), {{p.d_c, 1.0}}, p.d_max);
}

}  // namespace

double DesignProblem::mean_inv_degree() const {
  return 1.0 / (d_c * (1.0 - target_rate));
}

double DesignProblem::max_attainable_rate() const {
  // mean_inv_degree is capped by putting all edge mass on the lowest degree.
  const double m_max = 1.0 / min_degree(*this);
  return 1.0 - 1.0 / (d_c * m_max);
}

bool DesignProblem::rate_attainable() const {
  const double m = mean_inv_degree();
  return m >= 1.0 / d_max - 1e-15 && m <= 1.0 / min_degree(*this) + 1e-15;
}

DesignProblem DesignProblem::clamped_to_attainable() const {
  DesignProblem p = *this;
  const double min_rate = 1.0 - static_cast<double>(d_max) / d_c;
  p.target_rate = std::clamp(target_rate, std::max(min_rate, 1e-9), max_attainable_rate());
  return p;
}

void DesignProblem::validate() const {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw std::invalid_argument("design: target rate must lie in (0,1)");
  }
  if (d_c < 3) throw std::invalid_argument("design: d_c must be at least 3");
  if (d_max < 2) throw std::invalid_argument("design: d_max must be at least 2");
  if (x_grid_points < 2) throw std::invalid_argument("design: x grid needs at least 2 points");
  if (!rate_attainable()) {
    throw std::invalid_argument(
        "design: mean-degree constraint 1/(d_c(1-R)) is outside the attainable range for this "
        "degree policy");
  }
}

std::optional<DegreeDistribution> feasible_at(const DesignProblem& problem, double eps0) {
  problem.validate();
  if (!(eps0 > 0.0 && eps0 < 1.0)) {
    throw std::invalid_argument("design: eps0 must lie in (0,1)");
  }
  const int lo = min_degree(problem);
  const int nv = problem.d_max - lo + 1;

  lp::Problem p;
  p.num_vars = nv;
  std::vector<double> ones(nv, 1.0);
  std::vector<double> inv(nv);
  for (int i = 0; i < nv; ++i) inv[i] = 1.0 / (lo + i);
  p.eq_rows = {ones, inv};
  p.eq_rhs = {1.0, problem.mean_inv_degree()};

  const int g = problem.x_grid_points;
  const double x_hi = std::max(eps0, problem.eps_thresh);
  std::vector<double> obj(nv, 0.0);
  p.ub_rows.reserve(g);
  p.ub_rhs.reserve(g);
  for (int k = 0; k < g; ++k) {
    const double x = problem.eps_thresh + (x_hi - problem.eps_thresh) * k / (g - 1);
    const double y = 1.0 - std::pow(1.0 - x, problem.d_c - 1);
    std::vector<double> row(nv);
    for (int i = 0; i < nv; ++i) {
      row[i] = eps0 * std::pow(y, lo + i - 1);
      obj[i] += row[i];
    }
    p.ub_rows.push_back(std::move(row));
    p.ub_rhs.push_back(x - problem.margin);
  }
  // Maximizing the summed constraint activity drives the convergence rows to
  // bind, so the returned ensemble's threshold lands at eps0 rather than
  // somewhere above it.
  p.objective = std::move(obj);

  auto x = lp::solve(p);
  if (!x) return std::nullopt;
  return to_distribution(problem, *x);
}

namespace {

CodeSpec finish(const DesignProblem& problem, const DegreeDistribution& dist, double eps_bisect,
                const std::string& label) {
  const double recomputed = threshold(dist, ThresholdConfig{problem.eps_thresh, 10000, 1e-6});
  if (std::abs(recomputed - eps_bisect) > kRecomputeTol) {
    throw std::runtime_error("design: recomputed threshold " + std::to_string(recomputed) +
                             " disagrees with construction value " + std::to_string(eps_bisect));
  }
  const double rate = dist.design_rate();
  return CodeSpec(dist, rate, recomputed,
                  label.empty() ? default_label(rate, problem.d_c) : label);
}

}  // namespace

CodeSpec optimize(const DesignProblem& problem, const std::string& label) {
  problem.validate();
  double lo = 0.0;
  double hi = 1.0 - problem.target_rate;
  std::optional<DegreeDistribution> best;
  double best_eps = 0.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    auto dist = feasible_at(problem, mid);
    if (dist) {
      lo = mid;
      best_eps = mid;
      best = std::move(dist);
    } else {
      hi = mid;
    }
  }
  if (!best) {
    // The bisection never went below eps_thresh scale with a valid problem;
    // fall back to the smallest meaningful candidate before giving up.
    best = feasible_at(problem, problem.eps_thresh);
    best_eps = problem.eps_thresh;
    if (!best) throw std::runtime_error("design: no feasible ensemble found at any eps0");
  }
  return finish(problem, *best, best_eps, label);
}

CodeSpec design_to_threshold(const DesignProblem& problem, double eps_target,
                             const std::string& label) {
  problem.validate();
  auto dist = feasible_at(problem, eps_target);
  if (!dist) {
    throw std::runtime_error("design: requested threshold " + std::to_string(eps_target) +
                             " is not feasible at rate " + std::to_string(problem.target_rate));
  }
  return finish(problem, *dist, eps_target, label);
}

CodePalette build_standard_palette() {
  struct Entry {
    int num, den;
    double eps_target;
  };
  // One code per standard rate; the operating thresholds of the d_c = 7
  // family. Rates above 1 - 2/d_c clamp to it (the top entry lands on the
  // all-degree-2 ensemble at rate 5/7).
  const std::vector<Entry> entries = {
      {1, 5, 0.728}, {1, 4, 0.708}, {1, 3, 0.657}, {2, 5, 0.589},
      {1, 2, 0.478}, {3, 5, 0.367}, {2, 3, 0.274}, {3, 4, 0.167},
  };
  std::vector<std::future<CodeSpec>> jobs;
  jobs.reserve(entries.size());
  for (const auto& e : entries) {
    jobs.push_back(std::async(std::launch::async, [e]() {
      DesignProblem p;
      p.target_rate = static_cast<double>(e.num) / e.den;
      p = p.clamped_to_attainable();
      int num = e.num, den = e.den;
      if (p.target_rate < static_cast<double>(e.num) / e.den - 1e-12) {
        num = p.d_c - 2;  // clamped to 1 - 2/d_c
        den = p.d_c;
        const int g = std::gcd(num, den);
        num /= g;
        den /= g;
      }
      char label[64];
      std::snprintf(label, sizeof(label), "R=%d/%d dc=%d", num, den, p.d_c);
      return design_to_threshold(p, e.eps_target, label);
    }));
  }
  std::vector<CodeSpec> codes;
  codes.reserve(jobs.size());
  for (auto& j : jobs) codes.push_back(j.get());
  return CodePalette(std::move(codes));
}

}  // namespace cransim
