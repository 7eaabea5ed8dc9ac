#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cransim/rng.hpp"

namespace cransim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

// 110-cell hexagonal deployment (11 columns x 10 offset rows, unit inter-site
// distance) with a central computing cluster of mutually adjacent cells.
// Immutable after construction.
class Topology {
 public:
  static constexpr int kCells = 110;
  // Circumradius of the hexagonal cell for unit inter-site distance.
  static double hex_radius();

  // cluster_size in [1, 10]: the center cell plus its nearest neighbors in
  // ring order. alpha >= 2, 0 <= s <= 1.
  static Topology build(int cluster_size, double alpha, double gamma_db, double s);

  const std::vector<Point>& bs_positions() const { return bs_; }
  const std::vector<int>& cluster_ids() const { return cluster_; }
  int center_cell() const { return center_; }
  double alpha() const { return alpha_; }
  double s() const { return s_; }
  double gamma_db() const { return gamma_db_; }
  double gamma_linear() const { return gamma_linear_; }

 private:
  Topology() = default;
  std::vector<Point> bs_;
  std::vector<int> cluster_;
  int center_ = 0;
  double alpha_ = 3.0;
  double s_ = 0.1;
  double gamma_db_ = 20.0;
  double gamma_linear_ = 100.0;
};

// One trial's user placement: at most one active mobile per cell, placed
// uniformly over the hexagonal cell area.
struct Drop {
  std::vector<std::optional<Point>> users;  // indexed by cell
  double utilization = 0.0;

  int occupied_count() const;
};

Drop drop_users(const Topology& topo, double u, rng::Prng& rng);

// Linear uplink SINR at the base station of occupied cell j with fractional
// power control:
//   gamma_j = d_jj^(alpha (s-1)) /
//             (Gamma^-1 + sum_{i != j} d_ji^(-alpha) d_ii^(s alpha)),
// the interference summing over every other occupied cell in the network.
// Throws std::invalid_argument when cell j has no user.
double sinr(const Topology& topo, const Drop& drop, int cell);

// Per-cluster-cell initial erasure probability; nullopt marks an empty cell.
using ClusterSnapshot = std::vector<std::optional<double>>;

// SINR(dB) -> eps0 mapping calibrated from the empirical CCDF of cluster-cell
// SINRs under default parameters. The default mapping is the exponential fit
// clamp(exp(a * gamma_db + b), 0, 1); the raw CCDF table is retained and a
// piecewise-linear table mode is available for sensitivity checks.
class CalibrationCurve {
 public:
  enum class Mode { exponential_fit, table };

  struct TablePoint {
    double gamma_db;
    double ccdf;
  };

  CalibrationCurve(double a, double b, double gamma_db_min, double gamma_db_max,
                   std::vector<TablePoint> table, long samples, std::uint64_t seed);

  double eps0_from_sinr_db(double gamma_db) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double gamma_db_min() const { return gamma_db_min_; }
  double gamma_db_max() const { return gamma_db_max_; }
  long samples() const { return samples_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<TablePoint>& table() const { return table_; }
  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

  void write(std::ostream& out) const;
  static CalibrationCurve read(std::istream& in);
  void save(const std::string& path) const;
  static CalibrationCurve load(const std::string& path);

 private:
  double a_;
  double b_;
  double gamma_db_min_;
  double gamma_db_max_;
  std::vector<TablePoint> table_;
  long samples_;
  std::uint64_t seed_;
  Mode mode_ = Mode::exponential_fit;
};

// Simulates full-utilization drops on the given topology, collects cluster
// SINRs, and fits the exponential CCDF model by least squares on log CCDF over
// the 0.01 <= CCDF <= 0.99 range. Requires at least 1000 samples.
CalibrationCurve calibrate(const Topology& topo, int trials, rng::Prng& rng,
                           std::uint64_t seed_tag = 0);

// eps0 for every cluster cell of one drop (empty marker for unoccupied cells).
ClusterSnapshot snapshot(const Topology& topo, const Drop& drop, const CalibrationCurve& curve);

}  // namespace cransim
