#include "cransim/cellular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cransim {

namespace {

constexpr int kCols = 11;
constexpr int kRows = 10;
constexpr double kRowPitch = 0.8660254037844386;  // sqrt(3)/2

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double Topology::hex_radius() { return 1.0 / std::sqrt(3.0); }

Topology Topology::build(int cluster_size, double alpha, double gamma_db, double s) {
  if (cluster_size < 1 || cluster_size > 10) {
    throw std::invalid_argument("cluster size must lie in [1,10]");
  }
  if (alpha < 2.0) throw std::invalid_argument("path-loss exponent must be at least 2");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("power-control factor must lie in [0,1]");

  Topology t;
  t.alpha_ = alpha;
  t.s_ = s;
  t.gamma_db_ = gamma_db;
  t.gamma_linear_ = std::pow(10.0, gamma_db / 10.0);
  t.bs_.reserve(kCells);
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      t.bs_.push_back({c + 0.5 * (r % 2), r * kRowPitch});
    }
  }

  Point centroid{0.0, 0.0};
  for (const auto& p : t.bs_) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= kCells;
  centroid.y /= kCells;
  // Quantize distances so the lattice symmetry tie resolves by index.
  auto q = [](double d) { return std::llround(d * 1e9); };
  int center = 0;
  long long best = q(distance(t.bs_[0], centroid));
  for (int i = 1; i < kCells; ++i) {
    const long long d = q(distance(t.bs_[i], centroid));
    if (d < best) {
      best = d;
      center = i;
    }
  }
  t.center_ = center;

  // Ring order: distance to the center cell, then angle, then index.
  struct Key {
    long long dist;
    long long angle;
    int index;
  };
  std::vector<Key> keys;
  keys.reserve(kCells);
  for (int i = 0; i < kCells; ++i) {
    const double dx = t.bs_[i].x - t.bs_[center].x;
    const double dy = t.bs_[i].y - t.bs_[center].y;
    double ang = std::atan2(dy, dx);
    if (ang < 0) ang += 2.0 * 3.14159265358979323846;
    keys.push_back({q(std::hypot(dx, dy)), q(ang), i});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.index < b.index;
  });
  t.cluster_.reserve(cluster_size);
  for (int i = 0; i < cluster_size; ++i) t.cluster_.push_back(keys[i].index);
  return t;
}

int Drop::occupied_count() const {
  int n = 0;
  for (const auto& u : users) n += u.has_value();
  return n;
}

namespace {

// Uniform point in the pointy-top hexagonal cell by rejection from the
// bounding box: inside iff |x| <= 1/2 and |x|/sqrt(3) + |y| <= radius.
Point sample_hex_offset(rng::Prng& rng) {
  const double rh = Topology::hex_radius();
  for (;;) {
    const double x = rng.uniform(-0.5, 0.5);
    const double y = rng.uniform(-rh, rh);
    if (std::abs(x) / std::sqrt(3.0) + std::abs(y) <= rh) return {x, y};
  }
}

}  // namespace

Drop drop_users(const Topology& topo, double u, rng::Prng& rng) {
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("utilization must lie in [0,1]");
  Drop drop;
  drop.utilization = u;
  drop.users.assign(Topology::kCells, std::nullopt);
  for (int cell = 0; cell < Topology::kCells; ++cell) {
    if (rng.bernoulli(u)) {
      const Point offset = sample_hex_offset(rng);
      const Point& bs = topo.bs_positions()[cell];
      drop.users[cell] = Point{bs.x + offset.x, bs.y + offset.y};
    }
  }
  return drop;
}

double sinr(const Topology& topo, const Drop& drop, int cell) {
  if (cell < 0 || cell >= Topology::kCells || !drop.users[cell]) {
    throw std::invalid_argument("sinr: cell is not occupied");
  }
  const double alpha = topo.alpha();
  const double s = topo.s();
  const Point& bs = topo.bs_positions()[cell];
  const double serving = distance(bs, *drop.users[cell]);
  const double numerator = std::pow(serving, alpha * (s - 1.0));
  double denom = 1.0 / topo.gamma_linear();
  for (int i = 0; i < Topology::kCells; ++i) {
    if (i == cell || !drop.users[i]) continue;
    const Point& xi = *drop.users[i];
    const double cross = distance(bs, xi);
    const double own = distance(topo.bs_positions()[i], xi);
    denom += std::pow(cross, -alpha) * std::pow(own, s * alpha);
  }
  return numerator / denom;
}

CalibrationCurve::CalibrationCurve(double a, double b, double gamma_db_min, double gamma_db_max,
                                   std::vector<TablePoint> table, long samples, std::uint64_t seed)
    : a_(a),
      b_(b),
      gamma_db_min_(gamma_db_min),
      gamma_db_max_(gamma_db_max),
      table_(std::move(table)),
      samples_(samples),
      seed_(seed) {
  if (a_ >= 0.0) {
    throw std::invalid_argument("calibration: eps0 must decrease with SINR (a < 0)");
  }
}

double CalibrationCurve::eps0_from_sinr_db(double gamma_db) const {
  if (mode_ == Mode::exponential_fit || table_.empty()) {
    return std::clamp(std::exp(a_ * gamma_db + b_), 0.0, 1.0);
  }
  // Piecewise-linear interpolation of the stored CCDF table.
  if (gamma_db <= table_.front().gamma_db) return std::clamp(table_.front().ccdf, 0.0, 1.0);
  if (gamma_db >= table_.back().gamma_db) return std::clamp(table_.back().ccdf, 0.0, 1.0);
  auto it = std::lower_bound(table_.begin(), table_.end(), gamma_db,
                             [](const TablePoint& p, double g) { return p.gamma_db < g; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (gamma_db - lo.gamma_db) / (hi.gamma_db - lo.gamma_db);
  return std::clamp(lo.ccdf + w * (hi.ccdf - lo.ccdf), 0.0, 1.0);
}

CalibrationCurve calibrate(const Topology& topo, int trials, rng::Prng& rng,
                           std::uint64_t seed_tag) {
  std::vector<double> samples_db;
  samples_db.reserve(static_cast<std::size_t>(trials) * topo.cluster_ids().size());
  for (int t = 0; t < trials; ++t) {
    const Drop drop = drop_users(topo, 1.0, rng);
    for (int cell : topo.cluster_ids()) {
      const double g = sinr(topo, drop, cell);
      samples_db.push_back(10.0 * std::log10(g));
    }
  }
  if (samples_db.size() < 1000) {
    throw std::invalid_argument("calibrate: needs at least 1000 SINR samples");
  }
  std::sort(samples_db.begin(), samples_db.end());
  const std::size_t m = samples_db.size();

  // Least squares of log CCDF on gamma_db over the central probability range.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t kept = 0;
  double g_min = 0, g_max = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ccdf = 1.0 - (i + 0.5) / m;
    if (ccdf < 0.01 || ccdf > 0.99) continue;
    const double x = samples_db[i];
    const double y = std::log(ccdf);
    if (kept == 0) g_min = x;
    g_max = x;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++kept;
  }
  const double det = kept * sxx - sx * sx;
  if (kept < 2 || det == 0.0) {
    throw std::runtime_error("calibrate: degenerate SINR sample set");
  }
  const double a = (kept * sxy - sx * sy) / det;
  const double b = (sy - a * sx) / kept;

  // Compact quantile table of the empirical CCDF for the fallback mapping.
  constexpr int kTablePoints = 200;
  std::vector<CalibrationCurve::TablePoint> table;
  table.reserve(kTablePoints);
  for (int k = 0; k < kTablePoints; ++k) {
    const std::size_t i = static_cast<std::size_t>(
        std::min<double>(m - 1, (m - 1) * (k / double(kTablePoints - 1))));
    table.push_back({samples_db[i], 1.0 - (i + 0.5) / m});
  }
  return CalibrationCurve(a, b, g_min, g_max, std::move(table), static_cast<long>(m), seed_tag);
}

ClusterSnapshot snapshot(const Topology& topo, const Drop& drop, const CalibrationCurve& curve) {
  ClusterSnapshot snap;
  snap.reserve(topo.cluster_ids().size());
  for (int cell : topo.cluster_ids()) {
    if (!drop.users[cell]) {
      snap.push_back(std::nullopt);
      continue;
    }
    const double g_db = 10.0 * std::log10(sinr(topo, drop, cell));
    snap.push_back(curve.eps0_from_sinr_db(g_db));
  }
  return snap;
}

void CalibrationCurve::write(std::ostream& out) const {
  out << "calibration-version 1\n";
  out << "a " << format_sig(a_) << "\n";
  out << "b " << format_sig(b_) << "\n";
  out << "gamma_db_min " << format_sig(gamma_db_min_) << "\n";
  out << "gamma_db_max " << format_sig(gamma_db_max_) << "\n";
  out << "samples " << samples_ << "\n";
  out << "seed " << seed_ << "\n";
  out << "table " << table_.size() << "\n";
  for (const auto& p : table_) {
    out << format_sig(p.gamma_db) << " " << format_sig(p.ccdf) << "\n";
  }
}

CalibrationCurve CalibrationCurve::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "calibration-version 1") {
    throw std::runtime_error("calibration file: bad or missing version line");
  }
  double a = 0, b = 0, g_min = 0, g_max = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  std::size_t table_size = 0;
  auto next_kv = [&](const std::string& want) -> std::istringstream {
    if (!std::getline(in, line)) {
      throw std::runtime_error("calibration file: truncated before " + want);
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key != want) {
      throw std::runtime_error("calibration file: expected " + want + ", got " + key);
    }
    return ls;
  };
  next_kv("a") >> a;
  next_kv("b") >> b;
  next_kv("gamma_db_min") >> g_min;
  next_kv("gamma_db_max") >> g_max;
  next_kv("samples") >> samples;
  next_kv("seed") >> seed;
  next_kv("table") >> table_size;
  std::vector<TablePoint> table(table_size);
  for (auto& p : table) {
    if (!(in >> p.gamma_db >> p.ccdf)) {
      throw std::runtime_error("calibration file: truncated table");
    }
  }
  return CalibrationCurve(a, b, g_min, g_max, std::move(table), samples, seed);
}

void CalibrationCurve::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open calibration file for writing: " + path);
  write(out);
}

CalibrationCurve CalibrationCurve::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file: " + path);
  return read(in);
}

}  // namespace cransim
