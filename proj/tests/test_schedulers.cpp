#include <stdexcept>
#include <algorithm>
#include <cmath>

#include "cransim/code_design.hpp"
#include "cransim/schedulers.hpp"
#include "doctest.h"

using namespace cransim;

namespace {

// Synthetic single-rate option tables: every user offers one code at the
// given rate/complexity (or is empty / undecodable).
OptionTable one_rate_users(const std::vector<double>& complexities, double rate = 0.5) {
  OptionTable table;
  for (double c : complexities) {
    UserOptions u;
    u.rates = {rate};
    u.complexities = {c};
    table.push_back(std::move(u));
  }
  return table;
}

OptionTable random_table(rng::Prng& rng, int max_users, int max_rates) {
  const int n = 1 + static_cast<int>(rng.uniform_index(max_users));
  OptionTable table;
  for (int i = 0; i < n; ++i) {
    const double kind = rng.uniform();
    if (kind < 0.15) {
      table.push_back(std::nullopt);  // empty cell
      continue;
    }
    UserOptions u;
    if (kind > 0.25) {
      const int k = 1 + static_cast<int>(rng.uniform_index(max_rates));
      double rate = 0.0;
      for (int j = 0; j < k; ++j) {
        rate += rng.uniform(0.05, 0.3);
        u.rates.push_back(rate);
        u.complexities.push_back(std::floor(rng.uniform(0.0, 40.0)));
      }
    }
    table.push_back(std::move(u));  // possibly undecodable (empty vectors)
  }
  return table;
}

double total_decoded(const ScheduleDecision& d) {
  double sum = 0.0;
  for (double c : d.complexities) sum += c;
  return sum;
}

}  // namespace

TEST_CASE("mrs hand traces") {
  const Budget budget{25.0, 25.0};
  SUBCASE("over budget zeroes everyone") {
    const auto d = schedule_mrs(one_rate_users({5, 10, 20}), budget);
    CHECK(d.outage);
    CHECK(d.throughput == 0.0);
    for (double r : d.rates) CHECK(r == 0.0);
  }
  SUBCASE("within budget keeps the assignment") {
    const auto d = schedule_mrs(one_rate_users({5, 10}), budget);
    CHECK(!d.outage);
    CHECK(d.throughput == doctest::Approx(0.5));
    CHECK(d.total_complexity == doctest::Approx(15.0));
  }
  SUBCASE("empty cluster") {
    const auto d = schedule_mrs(OptionTable{std::nullopt, std::nullopt}, budget);
    CHECK(!d.outage);
    CHECK(d.throughput == 0.0);
  }
  SUBCASE("exact budget is not an outage") {
    const auto d = schedule_mrs(one_rate_users({5, 20}), budget);
    CHECK(!d.outage);
  }
}

TEST_CASE("ejf hand traces") {
  const Budget budget{25.0, 25.0};
  SUBCASE("greedy admission skips the most expensive user") {
    const auto d = schedule_ejf(one_rate_users({5, 10, 20}), budget);
    CHECK(d.rates[0] == doctest::Approx(0.5));
    CHECK(d.rates[1] == doctest::Approx(0.5));
    CHECK(d.rates[2] == 0.0);
    CHECK(d.throughput == doctest::Approx(1.0 / 3));
    CHECK(d.outage);  // a decodable user was dropped
  }
  SUBCASE("reduces to mrs when everything fits") {
    const auto d = schedule_ejf(one_rate_users({5, 10}), budget);
    const auto m = schedule_mrs(one_rate_users({5, 10}), budget);
    CHECK(d.rates == m.rates);
    CHECK(!d.outage);
  }
  SUBCASE("single user over budget is skipped") {
    const auto d = schedule_ejf(one_rate_users({30}), budget);
    CHECK(d.rates[0] == 0.0);
    CHECK(d.throughput == 0.0);
  }
  SUBCASE("ties admit the lower cell index first") {
    const auto d = schedule_ejf(one_rate_users({10, 10, 10}), budget);
    CHECK(d.rates[0] == doctest::Approx(0.5));
    CHECK(d.rates[1] == doctest::Approx(0.5));
    CHECK(d.rates[2] == 0.0);
  }
}

TEST_CASE("local limit hand traces") {
  SUBCASE("demotion triggered by the per-user cap") {
    OptionTable table;
    UserOptions u;
    u.rates = {0.2, 0.5};
    u.complexities = {4.0, 30.0};
    table.push_back(u);
    const auto d = schedule_local_limit(table, Budget{100.0, 25.0});
    CHECK(d.rates[0] == doctest::Approx(0.2));
    CHECK(d.complexities[0] == doctest::Approx(4.0));
    CHECK(!d.outage);
  }
  SUBCASE("no demotions means identical to mrs") {
    const auto table = one_rate_users({5, 10});
    const auto d = schedule_local_limit(table, Budget{25.0, 12.0});
    const auto m = schedule_mrs(table, Budget{25.0, 12.0});
    CHECK(d.rates == m.rates);
  }
  SUBCASE("user stuck above c_loc keeps the lowest rate") {
    const auto d = schedule_local_limit(one_rate_users({20}), Budget{25.0, 10.0});
    CHECK(d.rates[0] == doctest::Approx(0.5));
    CHECK(!d.outage);
  }
  SUBCASE("exhausted demotions over budget zero the cluster") {
    OptionTable table;
    for (int i = 0; i < 2; ++i) {
      UserOptions u;
      u.rates = {0.2, 0.5};
      u.complexities = {18.0, 40.0};
      table.push_back(u);
    }
    const auto d = schedule_local_limit(table, Budget{25.0, 10.0});
    CHECK(d.outage);
    CHECK(d.throughput == 0.0);
  }
}

TEST_CASE("scc hand traces") {
  SUBCASE("demotes the most complex user until the total fits") {
    OptionTable table = one_rate_users({5, 10}, 0.5);
    UserOptions big;
    big.rates = {0.25, 0.5};
    big.complexities = {2.0, 20.0};
    table.push_back(big);
    const auto d = schedule_scc(table, Budget{25.0, 25.0});
    CHECK(!d.outage);
    CHECK(d.total_complexity == doctest::Approx(17.0));
    CHECK(d.rates[2] == doctest::Approx(0.25));
    CHECK(d.throughput == doctest::Approx((0.5 + 0.5 + 0.25) / 3));
  }
  SUBCASE("already within budget reduces to mrs") {
    const auto table = one_rate_users({5, 10});
    CHECK(schedule_scc(table, Budget{25.0, 25.0}).rates ==
          schedule_mrs(table, Budget{25.0, 25.0}).rates);
  }
  SUBCASE("single undemotable user over budget is an outage") {
    const auto d = schedule_scc(one_rate_users({30}), Budget{25.0, 25.0});
    CHECK(d.outage);
    CHECK(d.throughput == 0.0);
  }
  SUBCASE("ties demote the lower cell index") {
    OptionTable table;
    for (int i = 0; i < 2; ++i) {
      UserOptions u;
      u.rates = {0.25, 0.5};
      u.complexities = {1.0, 20.0};
      table.push_back(u);
    }
    const auto d = schedule_scc(table, Budget{21.0, 21.0});
    CHECK(d.rates[0] == doctest::Approx(0.25));  // first demotion suffices
    CHECK(d.rates[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("budget safety and structural dominance over random tables") {
  rng::Prng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const OptionTable table = random_table(rng, 6, 4);
    const Budget budget{std::floor(rng.uniform(1.0, 120.0)), std::floor(rng.uniform(1.0, 60.0))};
    const auto mrs = schedule_mrs(table, budget);
    const auto ejf = schedule_ejf(table, budget);
    const auto ll = schedule_local_limit(table, budget);
    const auto scc = schedule_scc(table, budget);
    for (const auto* d : {&mrs, &ejf, &ll, &scc}) {
      CHECK(total_decoded(*d) <= budget.c_server + 1e-9);
      CHECK(d->throughput >= 0.0);
      // Assigned rates only ever come from each user's decodable menu.
      for (std::size_t c = 0; c < table.size(); ++c) {
        if (d->code_index[c] >= 0) {
          REQUIRE(table[c].has_value());
          CHECK(d->code_index[c] < static_cast<int>(table[c]->rates.size()));
        }
      }
    }
    // EJF and SCC dominate MRS snapshot-by-snapshot.
    CHECK(ejf.throughput >= mrs.throughput - 1e-12);
    CHECK(scc.throughput >= mrs.throughput - 1e-12);
    // Local Limit dominates MRS whenever no user trips the per-user cap.
    bool cap_tripped = false;
    for (const auto& user : table) {
      if (user && !user->complexities.empty() && user->complexities.back() > budget.c_loc) {
        cap_tripped = true;
      }
    }
    if (!cap_tripped) CHECK(ll.throughput >= mrs.throughput - 1e-12);
    // When MRS stays within budget, EJF and SCC return identical decisions
    // and Local Limit agrees unless a cap demotion fired.
    if (!mrs.outage) {
      CHECK(ejf.rates == mrs.rates);
      CHECK(scc.rates == mrs.rates);
      if (!cap_tripped) CHECK(ll.rates == mrs.rates);
    }
  }
}

TEST_CASE("schedulers are deterministic") {
  rng::Prng rng(13);
  const OptionTable table = random_table(rng, 6, 4);
  const Budget budget{40.0, 15.0};
  for (SchedulerKind kind : all_schedulers()) {
    const auto a = schedule(kind, table, budget);
    const auto b = schedule(kind, table, budget);
    CHECK(a.rates == b.rates);
    CHECK(a.outage == b.outage);
    CHECK(a.throughput == b.throughput);
  }
}

TEST_CASE("max-rate assignment against the standard palette") {
  // Palette thresholds: 0.728, 0.708, 0.657, 0.589, 0.478, 0.367, 0.274, 0.167.
  const CodePalette palette = build_standard_palette();
  const ComplexityCache cache(palette, DeConfig{});

  ClusterSnapshot snap{0.30, 0.75, 0.0, std::nullopt};
  const OptionTable options = build_options(snap, cache);

  REQUIRE(options[0].has_value());
  // eps0 = 0.30: the 3/5 code (threshold 0.367) is the best; 2/3 has 0.274.
  CHECK(options[0]->rates.back() == doctest::Approx(0.6).epsilon(1e-9));

  REQUIRE(options[1].has_value());
  CHECK(options[1]->rates.empty());  // 0.75 exceeds the 0.728 ceiling

  REQUIRE(options[2].has_value());
  CHECK(options[2]->rates.back() == doctest::Approx(5.0 / 7).epsilon(1e-9));
  CHECK(options[2]->complexities.back() == 0.0);  // zero iterations at eps0 = 0

  CHECK(!options[3].has_value());

  const auto d = schedule_mrs(options, Budget{1e9, 1e9});
  CHECK(d.rates[0] == doctest::Approx(0.6));
  CHECK(d.rates[1] == 0.0);
  CHECK(d.rates[2] == doctest::Approx(5.0 / 7));
  CHECK(d.rates[3] == 0.0);
  CHECK(d.throughput == doctest::Approx((0.6 + 5.0 / 7) / 4));
}

TEST_CASE("complexity cache is consistent and monotone enough") {
  const CodePalette palette = build_standard_palette();
  const ComplexityCache cache(palette, DeConfig{});
  // Repeated lookups return the same value (read-through determinism).
  const double c1 = cache.charged(4, 0.33333);
  const double c2 = cache.charged(4, 0.33333);
  CHECK(c1 == c2);
  // Quantization: values within the same 1e-4 bucket coincide.
  CHECK(cache.charged(4, 0.333349) == cache.charged(4, 0.333301));
  // Non-convergent inputs are charged the full iteration budget.
  const auto& code = palette[4];
  const double cap = 1000.0 * 7 * (1.0 - code.rate) / code.rate;
  CHECK(cache.charged(4, std::min(0.9999, code.threshold + 0.01)) == doctest::Approx(cap));
}

TEST_CASE("termination: demotions are bounded by palette size times users") {
  rng::Prng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const OptionTable table = random_table(rng, 8, 6);
    const Budget budget{rng.uniform(1.0, 30.0), rng.uniform(1.0, 10.0)};
    // If these ever looped, the suite would hang; assert the decisions exist.
    CHECK(schedule_scc(table, budget).throughput >= 0.0);
    CHECK(schedule_local_limit(table, budget).throughput >= 0.0);
  }
}
