#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "mcap/alloc.hpp"
#include "mcap/oracle.hpp"

using namespace mcap;
using namespace mcap::testing;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("single user enumerates the strategy set and picks its minimum") {
  Scenario s = basic_scenario(1, 2);
  const Solution sol = exhaustive(s);
  CHECK(sol.meta.trials == 5);
  CHECK(sol.meta.method == "oracle");

  double best = 1e300;
  StrategyProfile p(1, Strategy::local());
  for (const Strategy& cand : strategy_set(0, s)) {
    p[0] = cand;
    best = std::min(best, optimize_allocation(p, s).costs.objective);
  }
  CHECK(sol.costs.objective == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("exhaustive lower-bounds every valid profile") {
  Rng rng(2);
  for (int rep = 0; rep < 4; ++rep) {
    Scenario s = random_scenario(3, 2, 880 + rep, rep % 2 == 0);
    const Solution opt = exhaustive(s);
    for (int k = 0; k < 10; ++k) {
      StrategyProfile p = random_valid_profile(s, rng);
      CHECK(opt.costs.objective <=
            optimize_allocation(p, s).costs.objective + 1e-9);
    }
  }
}

TEST_CASE("profile count and budget refusal") {
  Scenario s = basic_scenario(10, 2);
  CHECK(profile_count(s) == 9765625ULL);  // 5^10
  CHECK_THROWS_AS(exhaustive(s), BudgetExceeded);
  try {
    exhaustive(s);
  } catch (const BudgetExceeded& e) {
    CHECK(e.count == 9765625ULL);
    CHECK(e.budget == 2000000ULL);
  }
  // A raised budget admits the same instance; a forbidden-heavy instance
  // shrinks below the default budget.
  Scenario small = basic_scenario(10, 2);
  for (Task& t : small.tasks) t.forbidden = {1};
  CHECK(profile_count(small) == 59049ULL);  // 3^10
}

TEST_CASE("duplicating a cap never hurts the optimum") {
  for (int rep = 0; rep < 20; ++rep) {
    Scenario s = random_scenario(3, 1, 9100 + rep);
    const double one_cap = exhaustive(s).costs.objective;
    Scenario wider = s;
    wider.caps.push_back(wider.caps[0]);
    for (Task& t : wider.tasks) {
      t.eta_up.push_back(t.eta_up[0]);
      t.eta_down.push_back(t.eta_down[0]);
    }
    const double two_caps = exhaustive(wider).costs.objective;
    CHECK(two_caps <= one_cap + 1e-9);
  }
}

TEST_CASE("random profiles are valid, uniform, and respect placement") {
  Scenario s = basic_scenario(1, 2);
  Rng rng(424242);
  std::map<std::pair<int, bool>, int> counts;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const StrategyProfile p = random_profile(s, rng);
    REQUIRE(validate_profile(p, s).ok());
    ++counts[{p[0].site, p[0].cloud}];
  }
  // Five options at p = 0.2: binomial sigma = sqrt(n p (1-p)) ~ 40.
  CHECK(counts.size() == 5);
  for (const auto& [key, c] : counts)
    CHECK(std::abs(c - draws / 5) <= 3 * 40 + 5);

  Scenario pinned = basic_scenario(2, 2);
  pinned.tasks[0].forbidden = {1, 2};
  Rng rng2(7);
  for (int k = 0; k < 100; ++k) {
    const StrategyProfile p = random_profile(pinned, rng2);
    CHECK(p[0] == Strategy::local());
  }
}

TEST_CASE("enumeration is deterministic") {
  Scenario s = random_scenario(3, 2, 31415, true);
  const Solution a = exhaustive(s);
  const Solution b = exhaustive(s);
  CHECK(a.profile == b.profile);
  CHECK(a.costs.objective == b.costs.objective);
}

TEST_SUITE_END();
