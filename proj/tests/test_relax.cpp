#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "mcap/alloc.hpp"
#include "mcap/oracle.hpp"
#include "mcap/qcqp.hpp"
#include "mcap/relax.hpp"

using namespace mcap;
using namespace mcap::testing;

namespace {

// Assemble, bound, and solve the lifted problem in rescaled units, the way
// the pipeline does.
SdpSolution solve_scaled(const Scenario& s, double tol = 1e-6) {
  const Scenario sc = scaled_units(s);
  SdpForm f = lift_to_sdp(assemble_qcqp(sc));
  const StrategyProfile all_local(s.n_users(), Strategy::local());
  apply_certificate_bounds(f, sc,
                           optimize_allocation(all_local, s).costs.objective);
  SdpSolveOptions opts;
  opts.tol = tol;
  return solve_sdp(f, sc, opts);
}

}  // namespace

TEST_SUITE_BEGIN("relax");

TEST_CASE("unit rescaling changes no objective value") {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    Scenario s = random_scenario(3, 2, 7200 + rep, rep % 2 == 0);
    const Scenario sc = scaled_units(s);
    sc.validate();
    for (int k = 0; k < 4; ++k) {
      StrategyProfile p = random_valid_profile(s, rng);
      const double a = optimize_allocation(p, s).costs.objective;
      const double b = optimize_allocation(p, sc).costs.objective;
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("polished solve meets the box, cone, and corner contracts") {
  Scenario s = random_scenario(3, 2, 808, true);
  const SdpSolution sol = solve_scaled(s);
  REQUIRE(sol.status != SdpStatus::Failed);

  const QcqpLayout L{3, 2};
  const int border = L.dim();
  CHECK(sol.Z(border, border) == 1.0);
  CHECK(sol.min_entry >= 0.0);
  CHECK(sol.min_eigenvalue >= -1e-6);
  CHECK(sol.max_eq_residual <= 1e-6);
  CHECK(sol.max_ineq_violation <= 1e-6);

  for (int i = 0; i < 3; ++i) {
    double sum = 0;
    for (int j = 0; j <= 2; ++j) {
      const double e = sol.Z(L.x(i, j), border);
      CHECK(e >= -1e-7);
      CHECK(e <= 1.0 + 1e-7);
      sum += e;
      if (j > 0 && s.tasks[i].is_forbidden(j)) CHECK(e == 0.0);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const double th = sol.Z(L.theta(i), border);
    CHECK(th >= -1e-7);
    CHECK(th <= 1.0 + 1e-7);
  }
}

TEST_CASE("certified bound sits below the enumerated optimum") {
  for (int rep = 0; rep < 3; ++rep) {
    Scenario s = random_scenario(3, 2, 9900 + rep, rep == 1);
    const SdpSolution sol = solve_scaled(s);
    REQUIRE(sol.status != SdpStatus::Failed);
    const double opt = exhaustive(s).costs.objective;
    CHECK(sol.certificate_valid);
    CHECK(sol.certified_lower_bound <= opt + 1e-5);
    CHECK(sol.primal_objective <= opt * 1.02 + 1e-6);
  }
}

TEST_CASE("marginal extraction clamps, zeroes, and normalizes") {
  Scenario s = basic_scenario(2, 2);
  s.tasks[1].forbidden = {2};
  const QcqpLayout L{2, 2};
  const int dim = L.dim() + 1;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(dim, dim);
  const int border = dim - 1;
  // User 0: mass 0.4 local, 0.6 on cap 1; cloud entry 0.3.
  Z(L.x(0, 0), border) = 0.4;
  Z(L.x(0, 1), border) = 0.6;
  Z(L.theta(0), border) = 0.3;
  // User 1: noisy entries outside [0,1] plus forbidden mass on cap 2.
  Z(L.x(1, 0), border) = -0.05;
  Z(L.x(1, 1), border) = 1.25;
  Z(L.x(1, 2), border) = 0.70;
  Z(L.theta(1), border) = 2.0;

  const Marginals m = extract_marginals(Z, s);
  CHECK(m.site(0, 0) == doctest::Approx(0.4));
  CHECK(m.site(0, 1) == doctest::Approx(0.6));
  CHECK(m.cloud[0] == doctest::Approx(0.3 / 0.6));
  // Forbidden site zeroed before normalization: row becomes {0, 1, 0}.
  CHECK(m.site(1, 2) == 0.0);
  CHECK(m.site(1, 0) == doctest::Approx(0.0));
  CHECK(m.site(1, 1) == doctest::Approx(1.0));
  CHECK(m.cloud[1] == 1.0);  // clamped conditional
  for (int i = 0; i < 2; ++i)
    CHECK(m.site.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate rows fall back to uniform over permitted sites") {
  Scenario s = basic_scenario(1, 2);
  s.tasks[0].forbidden = {1};
  const QcqpLayout L{1, 2};
  const Eigen::MatrixXd Z =
      Eigen::MatrixXd::Zero(L.dim() + 1, L.dim() + 1);
  const Marginals m = extract_marginals(Z, s);
  CHECK(m.site(0, 0) == doctest::Approx(0.5));
  CHECK(m.site(0, 1) == 0.0);
  CHECK(m.site(0, 2) == doctest::Approx(0.5));

  Scenario pinned = basic_scenario(1, 2);
  pinned.tasks[0].forbidden = {1, 2};
  const Marginals mp = extract_marginals(Z, pinned);
  CHECK(mp.site(0, 0) == 1.0);
  CHECK(mp.cloud[0] == 0.0);
}

TEST_CASE("rounding respects the marginals") {
  Marginals m;
  m.site = Eigen::MatrixXd(1, 3);
  m.site << 0.5, 0.3, 0.2;
  m.cloud = Eigen::VectorXd(1);
  m.cloud << 0.4;

  const int draws = 10000;
  const std::vector<StrategyProfile> trials = round_trials(m, draws, 99);
  int on_site[3] = {0, 0, 0};
  int cloudy = 0, offloaded = 0;
  for (const StrategyProfile& p : trials) {
    ++on_site[p[0].site];
    if (p[0].on_cap()) {
      ++offloaded;
      cloudy += p[0].cloud;
    } else {
      CHECK(!p[0].cloud);
    }
  }
  CHECK(std::abs(on_site[0] - 5000) <= 3 * 50 + 5);
  CHECK(std::abs(on_site[1] - 3000) <= 3 * 46 + 5);
  CHECK(std::abs(on_site[2] - 2000) <= 3 * 40 + 5);
  // Conditional cloud frequency among offloaded draws.
  const double rate = static_cast<double>(cloudy) / offloaded;
  CHECK(std::abs(rate - 0.4) <= 3 * 0.49 / std::sqrt(offloaded) + 1e-3);
}

TEST_CASE("one-hot marginals give identical trials") {
  Marginals m;
  m.site = Eigen::MatrixXd(2, 3);
  m.site << 0, 1, 0, 1, 0, 0;
  m.cloud = Eigen::VectorXd(2);
  m.cloud << 1.0, 0.0;
  const std::vector<StrategyProfile> trials = round_trials(m, 10, 5);
  for (const StrategyProfile& p : trials) {
    CHECK(p[0] == Strategy::cap(1, true));
    CHECK(p[1] == Strategy::local());
  }
  CHECK_THROWS_AS(round_trials(m, 0, 5), std::invalid_argument);
}

TEST_CASE("full pipeline is reproducible and respects its own bound") {
  Scenario s = random_scenario(2, 2, 2718);
  McapOptions opts;
  opts.seed = 13;
  opts.sdp_tol = 1e-6;
  const Solution a = mcap::mcap(s, opts);
  const Solution b = mcap::mcap(s, opts);
  CHECK(a.profile == b.profile);
  CHECK(a.costs.objective == b.costs.objective);
  CHECK(a.meta.sdp_objective == b.meta.sdp_objective);

  CHECK(a.meta.method == "mcap");
  CHECK(a.meta.trials == 10);
  CHECK(a.meta.sdp_bound_valid);
  CHECK(a.meta.sdp_objective >= 0.0);
  // Achieved integral objective can never undercut the certified bound.
  CHECK(a.costs.objective >= a.meta.sdp_objective - 1e-5);
  CHECK(validate_profile(a.profile, s).ok());
  CHECK(!a.meta.used_fallback);
}

TEST_CASE("fully constrained single user solves to pure local") {
  Scenario s = basic_scenario(1, 2);
  s.tasks[0].forbidden = {1, 2};
  const Solution sol = mcap::mcap(s, {});
  CHECK(sol.profile[0] == Strategy::local());
  const Task& t = s.tasks[0];
  const double expect = t.alpha * t.local_energy() + t.local_time();
  CHECK(sol.costs.objective == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("pipeline tracks the enumerated optimum closely") {
  int close = 0;
  const int rounds = 10;
  for (int rep = 0; rep < rounds; ++rep) {
    Scenario s = random_scenario(3, 2, 12000 + rep, rep % 2 == 0);
    McapOptions opts;
    opts.seed = 100 + rep;
    opts.sdp_tol = 1e-5;
    const Solution sol = mcap::mcap(s, opts);
    const Solution opt = exhaustive(s);
    CHECK(sol.costs.objective >= opt.costs.objective - 1e-9);
    CHECK(sol.meta.sdp_objective <= opt.costs.objective + 1e-5);
    close += sol.costs.objective <= 1.10 * opt.costs.objective;
  }
  CHECK(close >= 7);
}

TEST_SUITE_END();
