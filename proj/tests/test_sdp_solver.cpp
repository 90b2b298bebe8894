#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "mcap/alloc.hpp"
#include "mcap/qcqp.hpp"
#include "mcap/sdp.hpp"
#include "mcap/sdp_solver.hpp"

using namespace mcap;
using namespace mcap::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hand-built two-dimensional lift: variables (w0, 1), so Z is 2x2 with
// Z(1,1) the corner. Layout is irrelevant to the solver.
SdpForm tiny_form() {
  SdpForm f;
  f.dim = 2;
  f.corner.kind = ConstraintKind::Corner;
  f.corner.entries = {{1, 1, 1.0}};
  f.corner.equality = true;
  f.corner.rhs = 1.0;
  f.border_bound = {10.0, 1.0};
  f.diag_bound = {25.0, 1.0};
  return f;
}

SdpConstraint row(std::vector<std::tuple<int, int, double>> entries,
                  bool equality, double rhs) {
  SdpConstraint c;
  c.kind = ConstraintKind::Delay;  // kind is cosmetic for hand-built rows
  c.entries = std::move(entries);
  c.equality = equality;
  c.rhs = rhs;
  return c;
}

// Cheapest profile by full enumeration with exact allocations.
double brute_force_best(const Scenario& s) {
  const int n = s.n_users(), m = s.n_caps();
  std::vector<Strategy> options;
  options.push_back(Strategy::local());
  for (int j = 1; j <= m; ++j) options.push_back(Strategy::cap(j, false));
  for (int j = 1; j <= m; ++j) options.push_back(Strategy::cap(j, true));
  StrategyProfile p(n, Strategy::local());
  double best = kInf;
  std::vector<int> digits(n, 0);
  const int base = static_cast<int>(options.size());
  while (true) {
    for (int i = 0; i < n; ++i) p[i] = options[digits[i]];
    if (validate_profile(p, s).ok()) {
      best = std::min(best, optimize_allocation(p, s).costs.objective);
    }
    int i = 0;
    while (i < n && ++digits[i] == base) digits[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("sdp-solver");

TEST_CASE("inequality-pinned diagonal reaches the optimum with a tight bound") {
  SdpForm f = tiny_form();
  f.objective = {{0, 0, 1.0}};
  f.constraints.push_back(row({{0, 0, -1.0}}, false, -3.0));

  SdpSolveOptions opts;
  opts.tol = 1e-9;
  const SdpSolution sol = solve_sdp(f, opts);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.Z(0, 0) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(sol.primal_objective == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(sol.certificate_valid);
  CHECK(sol.certified_lower_bound <= sol.primal_objective + 1e-7);
  CHECK(sol.certified_lower_bound == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(sol.max_eq_residual <= 1e-7);
  CHECK(sol.max_ineq_violation <= 1e-7);
  CHECK(sol.Z(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("off-diagonal maximization is capped by the psd minor") {
  SdpForm f = tiny_form();
  f.border_bound = {1.0, 1.0};
  f.diag_bound = {1.0, 1.0};
  f.objective = {{0, 1, -0.5}};  // minimize -Z01
  f.constraints.push_back(row({{0, 0, 1.0}}, true, 1.0));

  SdpSolveOptions opts;
  opts.tol = 1e-9;
  const SdpSolution sol = solve_sdp(f, opts);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.Z(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.primal_objective == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(sol.certificate_valid);
  CHECK(sol.certified_lower_bound <= sol.primal_objective + 1e-7);
  // The entrywise certificate is exact here: multipliers at zero already
  // price the off-diagonal entry through sqrt(diag * diag) = 1.
  CHECK(sol.certified_lower_bound == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(sol.min_eigenvalue >= -1e-6);
  CHECK(sol.min_entry >= -1e-8);
}

TEST_CASE("psd coupling forces the diagonal above the squared border") {
  SdpForm f = tiny_form();
  f.objective = {{0, 0, 1.0}};
  f.constraints.push_back(row({{0, 1, 0.5}}, true, 2.0));

  SdpSolveOptions opts;
  opts.tol = 1e-9;
  const SdpSolution sol = solve_sdp(f, opts);
  CHECK(sol.status == SdpStatus::Optimal);
  // Z00 * Z11 >= Z01^2 with Z01 = 2, Z11 = 1.
  CHECK(sol.Z(0, 0) == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(sol.primal_objective == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(sol.certificate_valid);
  // Entrywise certificates cannot see the psd coupling; validity, not
  // tightness, is the contract.
  CHECK(sol.certified_lower_bound <= sol.primal_objective + 1e-7);
  CHECK(sol.max_eq_residual <= 1e-7);
}

TEST_CASE("structurally empty rows are dropped or refused") {
  SdpForm f = tiny_form();
  f.objective = {{0, 0, 1.0}};
  f.constraints.push_back(row({{0, 0, -1.0}}, false, -3.0));
  f.constraints.push_back(row({}, true, 0.0));  // vacuous, dropped

  SdpSolution sol = solve_sdp(f);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.Z(0, 0) == doctest::Approx(3.0).epsilon(1e-4));

  f.constraints.push_back(row({}, true, 1.0));  // 0 = 1
  sol = solve_sdp(f);
  CHECK(sol.status == SdpStatus::Failed);
  CHECK(sol.message.find("infeasible") != std::string::npos);
}

TEST_CASE("solver is deterministic") {
  SdpForm f = tiny_form();
  f.objective = {{0, 0, 1.0}, {0, 1, 0.25}};
  f.constraints.push_back(row({{0, 0, -1.0}}, false, -2.0));
  const SdpSolution a = solve_sdp(f);
  const SdpSolution b = solve_sdp(f);
  CHECK(a.primal_objective == b.primal_objective);
  CHECK(a.iterations == b.iterations);
  CHECK((a.Z - b.Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lifted instance stays below every integral profile") {
  Scenario s = basic_scenario(2, 1);
  const QcqpForm q = assemble_qcqp(s);
  SdpForm f = lift_to_sdp(q);

  const StrategyProfile all_local(2, Strategy::local());
  const AllocResult local_res = optimize_allocation(all_local, s);
  apply_certificate_bounds(f, s, local_res.costs.objective);

  SdpSolveOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 8000;
  const SdpSolution sol = solve_sdp(f, opts);
  REQUIRE(sol.status != SdpStatus::Failed);

  const double oracle = brute_force_best(s);
  // Relaxation value sits below the best integral profile, up to solver
  // feasibility slack.
  CHECK(sol.primal_objective <= oracle * 1.02 + 1e-6);
  // The certificate must hold unconditionally.
  CHECK(sol.certificate_valid);
  CHECK(sol.certified_lower_bound <= oracle + 1e-6);
  CHECK(sol.max_eq_residual <= 1e-5);
  CHECK(sol.max_ineq_violation <= 1e-5);
  // Diagnostics stay finite and sane.
  CHECK(std::isfinite(sol.primal_objective));
  CHECK(sol.Z(f.dim - 1, f.dim - 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("placement-restricted instance keeps a valid certificate") {
  Scenario s = random_scenario(2, 2, 91, true);
  bool any_forbidden = false;
  for (const Task& t : s.tasks) any_forbidden |= !t.forbidden.empty();
  if (!any_forbidden) s.tasks[0].forbidden = {1};

  const QcqpForm q = assemble_qcqp(s);
  SdpForm f = lift_to_sdp(q);
  const StrategyProfile all_local(2, Strategy::local());
  apply_certificate_bounds(f, s,
                           optimize_allocation(all_local, s).costs.objective);

  SdpSolveOptions opts;
  opts.tol = 3e-6;
  opts.max_iter = 8000;
  const SdpSolution sol = solve_sdp(f, opts);
  REQUIRE(sol.status != SdpStatus::Failed);
  const double oracle = brute_force_best(s);
  CHECK(sol.certificate_valid);
  CHECK(sol.certified_lower_bound <= oracle + 1e-6);
  CHECK(sol.primal_objective <= oracle * 1.05 + 1e-6);
}

TEST_SUITE_END();
