#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cransim/cellular.hpp"
#include "cransim/density_evolution.hpp"
#include "cransim/ensemble.hpp"

namespace cransim {

enum class SchedulerKind { mrs, ejf, local_limit, scc };

const char* scheduler_name(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler(const std::string& name);
std::vector<SchedulerKind> all_schedulers();

struct Budget {
  double c_server;  // total cluster complexity budget
  double c_loc;     // per-user limit, Local Limit only
};

// Read-through cache of charged per-bit complexities, keyed by palette code
// and eps0 quantized to 1e-4 (the DE run uses the quantized representative so
// results are independent of arrival order). A run that fails to converge is
// charged the full iteration cap; demotion or skipping then follows naturally.
// Safe for concurrent lookups from Monte Carlo workers.
class ComplexityCache {
 public:
  ComplexityCache(const CodePalette& palette, DeConfig cfg);

  double charged(std::size_t code_index, double eps0) const;

  const CodePalette& palette() const { return palette_; }
  const DeConfig& de_config() const { return cfg_; }

 private:
  double compute(std::size_t code_index, double eps0_q) const;

  const CodePalette& palette_;
  DeConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> memo_;
};

// Per-user decision inputs: the decodable codes (always a palette prefix,
// since thresholds decrease with rate) and their charged complexities.
// nullopt marks an empty cluster cell; an empty prefix marks a user whose
// eps0 exceeds every threshold.
struct UserOptions {
  std::vector<double> rates;         // ascending, palette prefix
  std::vector<double> complexities;  // parallel to rates
};

using OptionTable = std::vector<std::optional<UserOptions>>;

OptionTable build_options(const ClusterSnapshot& snap, const ComplexityCache& cache);

struct ScheduleDecision {
  std::vector<double> rates;         // per cluster cell; 0 = empty/undecodable/skipped
  std::vector<double> complexities;  // per cluster cell; 0 where rate is 0
  std::vector<int> code_index;       // -1 where no code is assigned
  bool outage = false;               // some decodable user lost its rate to the budget
  double throughput = 0.0;           // mean assigned rate over all cluster cells
  double total_complexity = 0.0;     // sum over decoded users
};

// Maximum-rate selection (all-or-nothing): every user takes its highest
// decodable rate; exceeding the budget zeroes the whole cluster.
ScheduleDecision schedule_mrs(const OptionTable& options, const Budget& budget);

// Easiest-job-first: max-rate selection, then greedy admission in increasing
// complexity order (ties to the lower cell index); users that do not fit
// are skipped at rate 0.
ScheduleDecision schedule_ejf(const OptionTable& options, const Budget& budget);

// Per-user cap: any user above c_loc steps down one rate at a time until it
// fits or reaches the lowest rate (which it then keeps); a final cluster-wide
// budget check zeroes everyone on failure.
ScheduleDecision schedule_local_limit(const OptionTable& options, const Budget& budget);

// Strongest-computation-control: while over budget, demote the most complex
// user that still has a lower rate (ties to the lower cell index); if nothing
// is demotable and the budget is still exceeded, the cluster zeroes.
ScheduleDecision schedule_scc(const OptionTable& options, const Budget& budget);

ScheduleDecision schedule(SchedulerKind kind, const OptionTable& options, const Budget& budget);

// Convenience wrapper: snapshot -> options -> decision.
ScheduleDecision schedule(SchedulerKind kind, const ClusterSnapshot& snap,
                          const ComplexityCache& cache, const Budget& budget);

}  // namespace cransim
