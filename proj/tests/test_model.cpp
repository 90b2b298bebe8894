#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "mcap/model.hpp"

using namespace mcap;
using namespace mcap::testing;

TEST_SUITE_BEGIN("model");

TEST_CASE("local processing delay matches time-per-bit arithmetic") {
  Scenario s = basic_scenario(1, 1);
  s.tasks[0].d_in = 1.6e8;
  s.tasks[0].local_time_per_bit = 9.93e-8;
  StrategyProfile p = {Strategy::local()};
  const CostBreakdown c = evaluate(p, Allocation::zeros(1, 1), s);
  CHECK(c.delay[0] == doctest::Approx(15.888).epsilon(1e-9));
  CHECK(c.round_time == c.delay[0]);
  // Local users incur no CAP or cloud terms.
  CHECK(c.energy[0] == doctest::Approx(s.tasks[0].local_energy()).epsilon(1e-12));
}

TEST_CASE("cloud chain adds access-link and cloud-compute time") {
  Scenario s = basic_scenario(1, 1);
  s.tasks[0].d_in = 1.6e8;
  s.tasks[0].d_out = 1.6e7;
  s.cloud.r_ac = 15e6;
  const double chain = cloud_chain_delay(s.tasks[0], s.cloud);
  const double t_ac = 1.76e8 / 15e6;
  CHECK(t_ac == doctest::Approx(11.7333333).epsilon(1e-6));
  CHECK(chain ==
        doctest::Approx(t_ac + s.tasks[0].cycles / s.cloud.f_c).epsilon(1e-12));

  StrategyProfile p = {Strategy::cap(1, true)};
  Allocation a = equal_split_allocation(p, s);
  const CostBreakdown c = evaluate(p, a, s);
  const Task& t = s.tasks[0];
  const double expected = t.d_in / (t.eta_up[0] * a.c_up(0, 1)) +
                          t.d_out / (t.eta_down[0] * a.c_down(0, 1)) + chain;
  CHECK(c.delay[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(c.energy[0] == doctest::Approx(t.tx_energy() + t.rx_energy() +
                                       t.beta * t.cloud_utility)
                           .epsilon(1e-12));
}

TEST_CASE("individual cost carries the shared round time") {
  // Two local users engineered to delays 5 s / 3 s and energies 2 J / 1 J.
  Scenario s = basic_scenario(2, 1);
  s.tasks[0].d_in = 1e8;
  s.tasks[0].local_time_per_bit = 5e-8;
  s.tasks[0].local_energy_per_bit = 2e-8;
  s.tasks[1].d_in = 1e8;
  s.tasks[1].local_time_per_bit = 3e-8;
  s.tasks[1].local_energy_per_bit = 1e-8;
  StrategyProfile p = {Strategy::local(), Strategy::local()};
  const Allocation a = Allocation::zeros(2, 1);
  CHECK(individual_cost(0, p, a, s) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(individual_cost(1, p, a, s) == doctest::Approx(5.5).epsilon(1e-12));

  const CostBreakdown c = evaluate(p, a, s);
  const double sum = individual_cost(0, p, a, s) + individual_cost(1, p, a, s);
  CHECK(sum == doctest::Approx(c.objective + 1 * c.round_time).epsilon(1e-12));
}

TEST_CASE("single user individual cost equals the objective") {
  Scenario s = basic_scenario(1, 2);
  Rng rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    StrategyProfile p = random_valid_profile(s, rng);
    Allocation a = equal_split_allocation(p, s);
    CHECK(individual_cost(0, p, a, s) ==
          doctest::Approx(evaluate(p, a, s).objective).epsilon(1e-12));
  }
}

TEST_CASE("validate_profile flags each constraint") {
  Scenario s = basic_scenario(1, 2);

  CHECK(validate_profile({Strategy::local()}, s).ok());

  ValidationReport r = validate_profile({{0, true}}, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].constraint == "cloud-needs-cap");

  s.tasks[0].forbidden = {1};
  r = validate_profile({Strategy::cap(1, false)}, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].constraint == "placement");

  r = validate_profile({Strategy::cap(3, false)}, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].constraint == "one-site");

  CHECK_THROWS_AS(validate_profile(StrategyProfile{}, s),
                  std::invalid_argument);
}

TEST_CASE("assigned user with zero resources is an error, not infinity") {
  Scenario s = basic_scenario(1, 1);
  StrategyProfile p = {Strategy::cap(1, false)};
  CHECK_THROWS_AS(evaluate(p, Allocation::zeros(1, 1), s), std::domain_error);

  Allocation a = equal_split_allocation(p, s);
  a.f_cap(0, 1) = 0;
  CHECK_THROWS_AS(evaluate(p, a, s), std::domain_error);
}

TEST_CASE("objective recomposes from parts") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    Scenario s = random_scenario(4, 2, 1000 + rep, rep % 2 == 1);
    StrategyProfile p = random_valid_profile(s, rng);
    Allocation a = equal_split_allocation(p, s);
    const CostBreakdown c = evaluate(p, a, s);
    double weighted = 0, max_delay = 0;
    for (int i = 0; i < s.n_users(); ++i) {
      weighted += s.tasks[i].alpha * c.energy[i];
      max_delay = std::max(max_delay, c.delay[i]);
    }
    CHECK(c.round_time == max_delay);
    CHECK(c.objective ==
          doctest::Approx(weighted + max_delay).epsilon(1e-9));
  }
}

TEST_CASE("evaluate is pure: identical inputs give bit-identical outputs") {
  Scenario s = random_scenario(5, 2, 99);
  Rng rng(5);
  StrategyProfile p = random_valid_profile(s, rng);
  Allocation a = equal_split_allocation(p, s);
  const CostBreakdown c1 = evaluate(p, a, s);
  const CostBreakdown c2 = evaluate(p, a, s);
  CHECK(std::memcmp(&c1.objective, &c2.objective, sizeof(double)) == 0);
  for (int i = 0; i < s.n_users(); ++i) {
    CHECK(std::memcmp(&c1.delay[i], &c2.delay[i], sizeof(double)) == 0);
    CHECK(std::memcmp(&c1.energy[i], &c2.energy[i], sizeof(double)) == 0);
  }
}

TEST_CASE("doubling alpha doubles the energy part, round time unchanged") {
  Scenario s = random_scenario(4, 2, 123);
  Rng rng(9);
  StrategyProfile p = random_valid_profile(s, rng);
  Allocation a = equal_split_allocation(p, s);
  const CostBreakdown before = evaluate(p, a, s);
  Scenario doubled = s;
  for (Task& t : doubled.tasks) t.alpha *= 2;
  const CostBreakdown after = evaluate(p, a, doubled);
  CHECK(after.round_time == before.round_time);
  const double energy_before = before.objective - before.round_time;
  const double energy_after = after.objective - after.round_time;
  CHECK(energy_after == doctest::Approx(2 * energy_before).epsilon(1e-12));
}

TEST_CASE("more resources never increase an assigned user's delay") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    Scenario s = random_scenario(4, 2, 500 + rep);
    StrategyProfile p = random_valid_profile(s, rng);
    int assigned = -1;
    for (int i = 0; i < 4; ++i)
      if (p[i].on_cap()) assigned = i;
    if (assigned < 0) continue;
    Allocation a = equal_split_allocation(p, s);
    const double before = evaluate(p, a, s).delay[assigned];
    const int j = p[assigned].site;
    a.c_up(assigned, j) *= 1.0 + rng.u01();
    a.c_down(assigned, j) *= 1.0 + rng.u01();
    if (!p[assigned].cloud) a.f_cap(assigned, j) *= 1.0 + rng.u01();
    const double after = evaluate(p, a, s).delay[assigned];
    CHECK(after <= before);
  }
}

TEST_CASE("scenario validation rejects structural breakage") {
  Scenario s = basic_scenario(2, 2);
  CHECK_NOTHROW(s.validate());

  Scenario bad = s;
  bad.caps[0].c_ul = bad.caps[0].c_total * 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.tasks[0].eta_up.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.tasks[1].forbidden = {3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.tasks[0].d_in = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Fully forbidden users are legal.
  Scenario ok = s;
  ok.tasks[0].forbidden = {1, 2};
  CHECK_NOTHROW(ok.validate());
}

TEST_SUITE_END();
