#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cransim/cellular.hpp"
#include "cransim/schedulers.hpp"

namespace cransim {

// Default cluster budget per cell. A free model parameter: large enough that
// single-user complexity spikes stay survivable for the demotion schedulers,
// small enough that budget pressure still occurs under the defaults.
inline constexpr double kDefaultBudgetPerCell = 1000.0;

struct SimConfig {
  double alpha = 3.0;
  double utilization = 1.0;
  int cluster_size = 7;
  double gamma_db = 20.0;
  double s = 0.1;
  int trials = 1000;
  std::uint64_t seed = 1;
  SchedulerKind scheduler = SchedulerKind::mrs;
  std::optional<double> c_server;  // default: kDefaultBudgetPerCell * cluster_size
  std::optional<double> c_loc;     // default: c_server / cluster_size
  std::string palette_path;
  std::string calibration_path;
  DeConfig de;

  Budget resolve_budget() const;
  // Throws on hard violations; returns human-readable warnings for
  // parameters outside the standard sweep ranges.
  std::vector<std::string> validate() const;
};

// Immutable per-run state shared by all trials.
struct SimContext {
  Topology topo;
  std::shared_ptr<const CodePalette> palette;
  std::shared_ptr<const CalibrationCurve> curve;
  std::shared_ptr<ComplexityCache> cache;
  Budget budget;
  SchedulerKind scheduler;
  double utilization = 1.0;

  static SimContext make(const SimConfig& cfg);
  static SimContext make(const SimConfig& cfg, std::shared_ptr<const CodePalette> palette,
                         std::shared_ptr<const CalibrationCurve> curve);
};

struct TrialOutcome {
  double throughput;
  bool outage;
};

// One Monte Carlo trial: drop users, map cluster SINRs to eps0, schedule.
TrialOutcome run_trial(const SimContext& ctx, rng::Prng& trial_rng);

struct TrialSeries {
  std::vector<double> throughputs;  // indexed by trial
  std::vector<std::uint8_t> outages;
};

// Runs cfg.trials trials with per-trial seeds derived from point_seed,
// parallelized over threads; results are stored by trial index so the
// aggregate is independent of scheduling.
TrialSeries run_trials(const SimContext& ctx, int trials, std::uint64_t point_seed, int threads = 0);

enum class SweepVariable { alpha, utilization, cluster_size };

const char* sweep_variable_name(SweepVariable v);
std::optional<SweepVariable> parse_sweep_variable(const std::string& name);

struct SweepResult {
  std::string scheduler;
  double alpha;
  double utilization;
  int cluster_size;
  double gamma_db;
  double s;
  int trials;
  std::uint64_t seed;
  double mean_throughput;
  double stderr_throughput;
  double outage_prob;
};

SweepResult aggregate(const SimConfig& cfg, const TrialSeries& series);

// Runs every (scheduler, point) pair with common random numbers: the master
// seed and point index alone determine each trial's draws, so scheduler
// comparisons are paired. Rows come back sorted by (scheduler name, point).
std::vector<SweepResult> run_sweep(const SimConfig& base, SweepVariable variable,
                                   const std::vector<double>& points,
                                   const std::vector<SchedulerKind>& schedulers,
                                   int threads = 0);

// CSV persistence: fixed header, 12 significant digits, rows sorted by
// (scheduler, sweep variable). No timestamps.
void emit_results(const std::vector<SweepResult>& results, const std::string& path);
std::vector<SweepResult> parse_results(const std::string& path);

// Order-independent pairwise summation helpers used by the aggregators.
double pairwise_sum(const std::vector<double>& values);
double sample_mean(const std::vector<double>& values);
double sample_stderr(const std::vector<double>& values);

}  // namespace cransim
