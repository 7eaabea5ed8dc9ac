#include "cransim/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cransim {

namespace {

constexpr double kStallTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// eps(x) = x / lambda(1 - rho(1 - x)) restricted to eps(x) > x; +inf outside.
double eps_of_x(const DegreeDistribution& dist, double x) {
  const double den = dist.eval_lambda(1.0 - dist.eval_rho(1.0 - x));
  if (den <= 0.0) return kInf;
  const double val = x / den;
  return val > x ? val : kInf;
}

}  // namespace

double de_step(const DegreeDistribution& dist, double eps0, double eps_prev) {
  return eps0 * dist.eval_lambda(1.0 - dist.eval_rho(1.0 - eps_prev));
}

DeTrace run_de(const DegreeDistribution& dist, double eps0, const DeConfig& cfg) {
  DeTrace trace;
  trace.eps_sequence.push_back(eps0);
  if (eps0 <= cfg.eps_thresh) {
    trace.status = DeStatus::converged;
    return trace;
  }
  double prev = eps0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const double next = de_step(dist, eps0, prev);
    trace.eps_sequence.push_back(next);
    if (next <= cfg.eps_thresh) {
      trace.status = DeStatus::converged;
      return trace;
    }
    if (next >= prev - kStallTol) {
      trace.status = DeStatus::stalled;
      return trace;
    }
    prev = next;
  }
  trace.status = DeStatus::iteration_cap;
  return trace;
}

double threshold(const DegreeDistribution& dist, const ThresholdConfig& cfg) {
  if (dist.lambda_coeff(1) != 0.0) {
    throw std::invalid_argument("threshold requires lambda_1 = 0");
  }
  if (cfg.grid_points < 3 || !(cfg.x_lo > 0.0) || cfg.x_lo >= 1.0) {
    throw std::invalid_argument("bad threshold grid configuration");
  }
  const int n = cfg.grid_points;
  const double step = (1.0 - cfg.x_lo) / (n - 1);
  double best = kInf;
  int best_i = -1;
  for (int i = 0; i < n; ++i) {
    const double x = cfg.x_lo + step * i;
    const double v = eps_of_x(dist, x);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i < 0) {
    throw std::domain_error("eps(x) is undefined on the whole grid");
  }
  // Golden-section refinement in the interval bracketing the grid minimum.
  double a = cfg.x_lo + step * std::max(0, best_i - 1);
  double b = cfg.x_lo + step * std::min(n - 1, best_i + 1);
  constexpr double kGolden = 0.6180339887498949;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = eps_of_x(dist, c);
  double fd = eps_of_x(dist, d);
  while (b - a > cfg.refine_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = eps_of_x(dist, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = eps_of_x(dist, d);
    }
  }
  return std::min({best, fc, fd});
}

DeResult iterations_required(const DegreeDistribution& dist, double eps0, const DeConfig& cfg) {
  const DeTrace trace = run_de(dist, eps0, cfg);
  return DeResult{trace.status, trace.iterations()};
}

std::optional<double> complexity_per_bit(const CodeSpec& code, double eps0, const DeConfig& cfg) {
  const auto dc = code.distribution.check_degree();
  if (!dc) {
    throw std::invalid_argument("complexity is defined for check-regular codes only");
  }
  const DeResult res = iterations_required(code.distribution, eps0, cfg);
  if (!res.converged()) return std::nullopt;
  return res.iterations * *dc * (1.0 - code.rate) / code.rate;
}

}  // namespace cransim
