#include "cransim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <stdexcept>
#include <thread>

#include "cransim/code_design.hpp"

namespace cransim {

Budget SimConfig::resolve_budget() const {
  Budget b{};
  b.c_server = c_server.value_or(kDefaultBudgetPerCell * cluster_size);
  b.c_loc = c_loc.value_or(b.c_server / cluster_size);
  if (!(b.c_server > 0.0) || !(b.c_loc > 0.0)) {
    throw std::invalid_argument("budget values must be positive");
  }
  return b;
}

std::vector<std::string> SimConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (cluster_size < 1 || cluster_size > 10) {
    throw std::invalid_argument("cluster size must lie in [1,10]");
  }
  if (utilization < 0.0 || utilization > 1.0) {
    throw std::invalid_argument("utilization must lie in [0,1]");
  }
  if (alpha < 2.0) throw std::invalid_argument("path-loss exponent must be at least 2");
  std::vector<std::string> warnings;
  if (alpha > 5.0) warnings.push_back("alpha above the standard sweep range [2,5]");
  if (utilization < 0.6) warnings.push_back("utilization below the standard sweep range [0.6,1]");
  return warnings;
}

SimContext SimContext::make(const SimConfig& cfg) {
  std::shared_ptr<const CodePalette> palette;
  if (!cfg.palette_path.empty()) {
    palette = std::make_shared<const CodePalette>(CodePalette::load(cfg.palette_path));
  } else {
    palette = std::make_shared<const CodePalette>(build_standard_palette());
  }
  std::shared_ptr<const CalibrationCurve> curve;
  if (!cfg.calibration_path.empty()) {
    curve = std::make_shared<const CalibrationCurve>(CalibrationCurve::load(cfg.calibration_path));
  } else {
    // Calibration always uses the default parameter set, whatever this run
    // sweeps; it is the fixed SINR -> eps0 dictionary.
    constexpr std::uint64_t kCalibSeed = 0x5ca1ab1e;
    Topology defaults = Topology::build(7, 3.0, 20.0, 0.1);
    rng::Prng rng(rng::derive_seed(kCalibSeed, 0));
    curve = std::make_shared<const CalibrationCurve>(calibrate(defaults, 2000, rng, kCalibSeed));
  }
  return make(cfg, std::move(palette), std::move(curve));
}

SimContext SimContext::make(const SimConfig& cfg, std::shared_ptr<const CodePalette> palette,
                            std::shared_ptr<const CalibrationCurve> curve) {
  SimContext ctx{Topology::build(cfg.cluster_size, cfg.alpha, cfg.gamma_db, cfg.s),
                 std::move(palette),
                 std::move(curve),
                 nullptr,
                 cfg.resolve_budget(),
                 cfg.scheduler,
                 cfg.utilization};
  ctx.cache = std::make_shared<ComplexityCache>(*ctx.palette, cfg.de);
  return ctx;
}

TrialOutcome run_trial(const SimContext& ctx, rng::Prng& trial_rng) {
  const Drop drop = drop_users(ctx.topo, ctx.utilization, trial_rng);
  const ClusterSnapshot snap = snapshot(ctx.topo, drop, *ctx.curve);
  const ScheduleDecision d = schedule(ctx.scheduler, snap, *ctx.cache, ctx.budget);
  return {d.throughput, d.outage};
}

TrialSeries run_trials(const SimContext& ctx, int trials, std::uint64_t point_seed, int threads) {
  TrialSeries series;
  series.throughputs.assign(trials, 0.0);
  series.outages.assign(trials, 0);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, trials));
  auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      rng::Prng trial_rng(rng::derive_seed(point_seed, static_cast<std::uint64_t>(t)));
      const TrialOutcome out = run_trial(ctx, trial_rng);
      series.throughputs[t] = out.throughput;
      series.outages[t] = out.outage ? 1 : 0;
    }
  };
  if (workers == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return series;
}

double pairwise_sum(const std::vector<double>& values) {
  // Recursive halving: the result does not depend on how trials were
  // distributed over workers, and error growth is O(log n).
  struct Rec {
    static double sum(const double* v, std::size_t n) {
      if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
      }
      const std::size_t half = n / 2;
      return sum(v, half) + sum(v + half, n - half);
    }
  };
  return values.empty() ? 0.0 : Rec::sum(values.data(), values.size());
}

double sample_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_stderr(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = sample_mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

SweepResult aggregate(const SimConfig& cfg, const TrialSeries& series) {
  SweepResult r{};
  r.scheduler = scheduler_name(cfg.scheduler);
  r.alpha = cfg.alpha;
  r.utilization = cfg.utilization;
  r.cluster_size = cfg.cluster_size;
  r.gamma_db = cfg.gamma_db;
  r.s = cfg.s;
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  r.mean_throughput = sample_mean(series.throughputs);
  r.stderr_throughput = sample_stderr(series.throughputs);
  long outages = 0;
  for (auto o : series.outages) outages += o;
  r.outage_prob = series.outages.empty()
                      ? 0.0
                      : static_cast<double>(outages) / static_cast<double>(series.outages.size());
  return r;
}

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::alpha: return "alpha";
    case SweepVariable::utilization: return "utilization";
    case SweepVariable::cluster_size: return "cluster-size";
  }
  return "?";
}

std::optional<SweepVariable> parse_sweep_variable(const std::string& name) {
  if (name == "alpha") return SweepVariable::alpha;
  if (name == "utilization") return SweepVariable::utilization;
  if (name == "cluster-size" || name == "cluster_size") return SweepVariable::cluster_size;
  return std::nullopt;
}

std::vector<SweepResult> run_sweep(const SimConfig& base, SweepVariable variable,
                                   const std::vector<double>& points,
                                   const std::vector<SchedulerKind>& schedulers, int threads) {
  // Shared palette/calibration so every point sees the identical mapping.
  SimContext probe = SimContext::make(base);
  std::vector<SweepResult> rows;
  std::vector<SchedulerKind> kinds = schedulers;
  std::sort(kinds.begin(), kinds.end(), [](SchedulerKind a, SchedulerKind b) {
    return std::string(scheduler_name(a)) < std::string(scheduler_name(b));
  });
  for (SchedulerKind kind : kinds) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      SimConfig cfg = base;
      cfg.scheduler = kind;
      switch (variable) {
        case SweepVariable::alpha: cfg.alpha = points[p]; break;
        case SweepVariable::utilization: cfg.utilization = points[p]; break;
        case SweepVariable::cluster_size:
          cfg.cluster_size = static_cast<int>(std::lround(points[p]));
          break;
      }
      cfg.validate();
      SimContext ctx = SimContext::make(cfg, probe.palette, probe.curve);
      ctx.cache = probe.cache;  // complexity lookups shared across the sweep
      // The point seed ignores the scheduler, so comparisons are paired.
      const std::uint64_t point_seed = rng::derive_seed(cfg.seed, p + 1);
      const TrialSeries series = run_trials(ctx, cfg.trials, point_seed, threads);
      rows.push_back(aggregate(cfg, series));
    }
  }
  return rows;
}

namespace {

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void emit_results(const std::vector<SweepResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open results file for writing: " + path);
  std::vector<SweepResult> rows = results;
  std::sort(rows.begin(), rows.end(), [](const SweepResult& a, const SweepResult& b) {
    auto key = [](const SweepResult& r) {
      return std::tie(r.scheduler, r.alpha, r.utilization, r.cluster_size, r.gamma_db, r.s,
                      r.trials, r.seed);
    };
    return key(a) < key(b);
  });
  out << "scheduler,alpha,utilization,cluster_size,gamma_db,s,trials,seed,"
         "mean_throughput,stderr_throughput,outage_prob\n";
  for (const auto& r : rows) {
    out << r.scheduler << ',' << csv_num(r.alpha) << ',' << csv_num(r.utilization) << ','
        << r.cluster_size << ',' << csv_num(r.gamma_db) << ',' << csv_num(r.s) << ',' << r.trials
        << ',' << r.seed << ',' << csv_num(r.mean_throughput) << ','
        << csv_num(r.stderr_throughput) << ',' << csv_num(r.outage_prob) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<SweepResult> parse_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results file is empty: " + path);
  std::vector<SweepResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    SweepResult r{};
    auto next = [&]() -> std::string {
      if (!std::getline(ls, field, ',')) {
        throw std::runtime_error("results file: short row in " + path);
      }
      return field;
    };
    r.scheduler = next();
    r.alpha = std::stod(next());
    r.utilization = std::stod(next());
    r.cluster_size = std::stoi(next());
    r.gamma_db = std::stod(next());
    r.s = std::stod(next());
    r.trials = std::stoi(next());
    r.seed = std::stoull(next());
    r.mean_throughput = std::stod(next());
    r.stderr_throughput = std::stod(next());
    r.outage_prob = std::stod(next());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cransim
