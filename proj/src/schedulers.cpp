#include "cransim/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace cransim {

const char* scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::mrs: return "mrs";
    case SchedulerKind::ejf: return "ejf";
    case SchedulerKind::local_limit: return "local-limit";
    case SchedulerKind::scc: return "scc";
  }
  return "?";
}

std::optional<SchedulerKind> parse_scheduler(const std::string& name) {
  if (name == "mrs") return SchedulerKind::mrs;
  if (name == "ejf") return SchedulerKind::ejf;
  if (name == "local-limit") return SchedulerKind::local_limit;
  if (name == "scc") return SchedulerKind::scc;
  return std::nullopt;
}

std::vector<SchedulerKind> all_schedulers() {
  return {SchedulerKind::mrs, SchedulerKind::ejf, SchedulerKind::local_limit, SchedulerKind::scc};
}

ComplexityCache::ComplexityCache(const CodePalette& palette, DeConfig cfg)
    : palette_(palette), cfg_(cfg) {}

double ComplexityCache::compute(std::size_t code_index, double eps0_q) const {
  const CodeSpec& code = palette_[code_index];
  const int dc = *code.distribution.check_degree();
  const DeResult res = iterations_required(code.distribution, eps0_q, cfg_);
  // A run that stalls or hits the cap is charged the full iteration budget:
  // the decoder would burn it before giving up.
  const int iters = res.converged() ? res.iterations : cfg_.max_iters;
  return iters * dc * (1.0 - code.rate) / code.rate;
}

double ComplexityCache::charged(std::size_t code_index, double eps0) const {
  const std::uint64_t q = static_cast<std::uint64_t>(std::llround(eps0 * 1e4));
  const std::uint64_t key = (static_cast<std::uint64_t>(code_index) << 32) | q;
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const double value = compute(code_index, q * 1e-4);
  std::unique_lock lock(mutex_);
  return memo_.emplace(key, value).first->second;
}

OptionTable build_options(const ClusterSnapshot& snap, const ComplexityCache& cache) {
  const CodePalette& palette = cache.palette();
  OptionTable table;
  table.reserve(snap.size());
  for (const auto& eps0 : snap) {
    if (!eps0) {
      table.push_back(std::nullopt);
      continue;
    }
    UserOptions opts;
    const auto best = palette.best_code_for(*eps0);
    if (best) {
      // Decodable codes form the palette prefix [0, best].
      for (std::size_t k = 0; k <= *best; ++k) {
        opts.rates.push_back(palette[k].rate);
        opts.complexities.push_back(cache.charged(k, *eps0));
      }
    }
    table.push_back(std::move(opts));
  }
  return table;
}

namespace {

// Working assignment: current rate index per cell (-1 = none).
struct Assignment {
  std::vector<int> index;

  static Assignment max_rate(const OptionTable& options) {
    Assignment a;
    a.index.reserve(options.size());
    for (const auto& user : options) {
      if (!user || user->rates.empty()) {
        a.index.push_back(-1);
      } else {
        a.index.push_back(static_cast<int>(user->rates.size()) - 1);
      }
    }
    return a;
  }
};

double user_complexity(const OptionTable& options, const Assignment& a, std::size_t cell) {
  const int k = a.index[cell];
  return k < 0 ? 0.0 : (*options[cell]).complexities[k];
}

double total_complexity(const OptionTable& options, const Assignment& a) {
  double sum = 0.0;
  for (std::size_t c = 0; c < options.size(); ++c) sum += user_complexity(options, a, c);
  return sum;
}

ScheduleDecision to_decision(const OptionTable& options, const Assignment& a, bool zeroed) {
  ScheduleDecision d;
  const std::size_t n = options.size();
  d.rates.assign(n, 0.0);
  d.complexities.assign(n, 0.0);
  d.code_index.assign(n, -1);
  double rate_sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const int k = zeroed ? -1 : a.index[c];
    if (k < 0) continue;
    d.code_index[c] = k;
    d.rates[c] = (*options[c]).rates[k];
    d.complexities[c] = (*options[c]).complexities[k];
    d.total_complexity += d.complexities[c];
    rate_sum += d.rates[c];
  }
  if (zeroed) {
    // Only an outage when some user actually had a decodable rate to lose.
    for (const auto& user : options) {
      if (user && !user->rates.empty()) d.outage = true;
    }
  }
  d.throughput = n == 0 ? 0.0 : rate_sum / static_cast<double>(n);
  return d;
}

}  // namespace

ScheduleDecision schedule_mrs(const OptionTable& options, const Budget& budget) {
  Assignment a = Assignment::max_rate(options);
  const bool over = total_complexity(options, a) > budget.c_server;
  return to_decision(options, a, over);
}

ScheduleDecision schedule_ejf(const OptionTable& options, const Budget& budget) {
  Assignment a = Assignment::max_rate(options);
  if (total_complexity(options, a) <= budget.c_server) {
    return to_decision(options, a, false);
  }
  // Greedy admission, cheapest job first, ties to the lower cell index.
  std::vector<std::size_t> users;
  for (std::size_t c = 0; c < options.size(); ++c) {
    if (a.index[c] >= 0) users.push_back(c);
  }
  std::sort(users.begin(), users.end(), [&](std::size_t x, std::size_t y) {
    const double cx = user_complexity(options, a, x);
    const double cy = user_complexity(options, a, y);
    if (cx != cy) return cx < cy;
    return x < y;
  });
  double admitted = 0.0;
  bool skipped = false;
  for (std::size_t c : users) {
    const double cost = user_complexity(options, a, c);
    if (admitted + cost <= budget.c_server) {
      admitted += cost;
    } else {
      a.index[c] = -1;
      skipped = true;
    }
  }
  ScheduleDecision d = to_decision(options, a, false);
  d.outage = skipped;
  return d;
}

ScheduleDecision schedule_local_limit(const OptionTable& options, const Budget& budget) {
  Assignment a = Assignment::max_rate(options);
  // Per-user demotion chains are independent of each other: step down while
  // over the local limit and a lower rate exists. A user stuck above c_loc at
  // the lowest rate keeps it; the cluster-wide check below is the real gate.
  for (std::size_t c = 0; c < options.size(); ++c) {
    while (a.index[c] > 0 && user_complexity(options, a, c) > budget.c_loc) {
      --a.index[c];
    }
  }
  const bool over = total_complexity(options, a) > budget.c_server;
  return to_decision(options, a, over);
}

ScheduleDecision schedule_scc(const OptionTable& options, const Budget& budget) {
  Assignment a = Assignment::max_rate(options);
  double total = total_complexity(options, a);
  while (total > budget.c_server) {
    // Most complex user that can still step down; ties to the lower cell.
    int victim = -1;
    double worst = -1.0;
    for (std::size_t c = 0; c < options.size(); ++c) {
      if (a.index[c] <= 0) continue;
      const double cost = user_complexity(options, a, c);
      if (cost > worst) {
        worst = cost;
        victim = static_cast<int>(c);
      }
    }
    if (victim < 0) {
      return to_decision(options, a, true);  // nothing demotable left
    }
    total -= user_complexity(options, a, victim);
    --a.index[victim];
    total += user_complexity(options, a, victim);
  }
  return to_decision(options, a, false);
}

ScheduleDecision schedule(SchedulerKind kind, const OptionTable& options, const Budget& budget) {
  switch (kind) {
    case SchedulerKind::mrs: return schedule_mrs(options, budget);
    case SchedulerKind::ejf: return schedule_ejf(options, budget);
    case SchedulerKind::local_limit: return schedule_local_limit(options, budget);
    case SchedulerKind::scc: return schedule_scc(options, budget);
  }
  throw std::logic_error("unknown scheduler");
}

ScheduleDecision schedule(SchedulerKind kind, const ClusterSnapshot& snap,
                          const ComplexityCache& cache, const Budget& budget) {
  return schedule(kind, build_options(snap, cache), budget);
}

}  // namespace cransim
