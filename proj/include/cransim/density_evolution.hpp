#pragma once

#include <optional>
#include <vector>

#include "cransim/ensemble.hpp"

namespace cransim {

struct DeConfig {
  double eps_thresh = 1e-3;  // residual erasure probability counted as decoded
  int max_iters = 1000;
};

// Non-convergence is reported distinctly: a stalled recursion (fixed point
// above eps_thresh) versus running into the iteration cap.
enum class DeStatus { converged, stalled, iteration_cap };

struct DeTrace {
  std::vector<double> eps_sequence;  // starts with eps_0
  DeStatus status = DeStatus::converged;

  int iterations() const { return static_cast<int>(eps_sequence.size()) - 1; }
  bool converged() const { return status == DeStatus::converged; }
};

// One recursion step: eps0 * lambda(1 - rho(1 - eps_prev)).
double de_step(const DegreeDistribution& dist, double eps0, double eps_prev);

// Iterates de_step until the residual drops to eps_thresh (converged), the
// sequence stops decreasing while still above it (stalled), or max_iters is
// hit. Non-convergence is a normal result.
DeTrace run_de(const DegreeDistribution& dist, double eps0, const DeConfig& cfg = {});

struct ThresholdConfig {
  double x_lo = 1e-3;     // matches DeConfig::eps_thresh
  int grid_points = 10000;
  double refine_tol = 1e-6;
};

// Analytic erasure threshold: minimum of eps(x) = x / lambda(1 - rho(1 - x))
// over [x_lo, 1] restricted to eps(x) > x, located by a dense grid scan and
// golden-section refinement of the bracketing interval. Requires lambda_1 = 0.
double threshold(const DegreeDistribution& dist, const ThresholdConfig& cfg = {});

struct DeResult {
  DeStatus status;
  int iterations;  // iteration count of the underlying trace

  bool converged() const { return status == DeStatus::converged; }
};

// Predicted iteration count at eps0, or the non-convergence status.
DeResult iterations_required(const DegreeDistribution& dist, double eps0, const DeConfig& cfg = {});

// Decoder work per data bit, l * d_c * (1 - R) / R. Requires a check-regular
// code; nullopt when density evolution does not converge at eps0.
std::optional<double> complexity_per_bit(const CodeSpec& code, double eps0, const DeConfig& cfg = {});

}  // namespace cransim
