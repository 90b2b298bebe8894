#include "mcap/relax.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mcap/alloc.hpp"
#include "mcap/oracle.hpp"
#include "mcap/qcqp.hpp"

namespace mcap {

namespace {

// bits -> Mbit, Hz -> MHz, and the matching per-Mbit relabelings.
constexpr double kMega = 1e-6, kPerMega = 1e6;
// cycles -> Gcycles.
constexpr double kGiga = 1e-9;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

Scenario scaled_units(const Scenario& s) {
  Scenario out = s;
  for (Task& t : out.tasks) {
    t.d_in *= kMega;
    t.d_out *= kMega;
    t.cloud_utility *= kMega;
    t.cycles *= kGiga;
    t.beta *= kPerMega;
    t.local_time_per_bit *= kPerMega;
    t.local_energy_per_bit *= kPerMega;
    t.tx_energy_per_bit *= kPerMega;
    t.rx_energy_per_bit *= kPerMega;
  }
  for (CapSpec& c : out.caps) {
    c.c_ul *= kMega;
    c.c_dl *= kMega;
    c.c_total *= kMega;
    c.f_a *= kGiga;
  }
  out.cloud.f_c *= kGiga;
  out.cloud.r_ac *= kMega;
  return out;
}

SdpSolution solve_sdp(const SdpForm& form, const Scenario& scenario,
                      const SdpSolveOptions& opts) {
  SdpSolution sol = ::mcap::solve_sdp(form, opts);
  if (sol.status == SdpStatus::Failed) return sol;

  const QcqpLayout& L = form.layout;
  const int border = form.dim - 1;
  Eigen::MatrixXd& Z = sol.Z;

  // Elementwise clip, then make the spectrum nonnegative. The diagonal
  // shift preserves nonnegativity; the subsequent rescale pins the corner
  // at exactly 1 while keeping both cone memberships exact.
  Z = Z.cwiseMax(0.0);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z,
                                                      Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min < 0) Z.diagonal().array() -= lam_min;
  }
  if (Z(border, border) > 0) Z /= Z(border, border);

  // Border repair in the indicator block: forbidden sites exactly zero,
  // site rows summing to exactly 1, cloud entry within its constraint box.
  // The repairs are of the order of the solver residual, so the spectrum
  // stays nonnegative to measurement precision.
  for (int i = 0; i < L.n; ++i) {
    const Task& t = scenario.tasks[i];
    for (int j : t.forbidden) Z(L.x(i, j), border) = 0.0;
    double sum = 0;
    for (int j = 0; j <= L.m; ++j) {
      double& e = Z(L.x(i, j), border);
      e = std::max(e, 0.0);
      sum += e;
    }
    if (sum < 1e-12) {
      double permitted = 1;
      for (int j = 1; j <= L.m; ++j) permitted += !t.is_forbidden(j);
      for (int j = 0; j <= L.m; ++j)
        Z(L.x(i, j), border) = (j == 0 || !t.is_forbidden(j)) ? 1.0 / permitted
                                                              : 0.0;
    } else {
      for (int j = 0; j <= L.m; ++j) Z(L.x(i, j), border) /= sum;
    }
    double offload = 0;
    for (int j = 1; j <= L.m; ++j) offload += Z(L.x(i, j), border);
    double& th = Z(L.theta(i), border);
    th = std::min(std::max(th, 0.0), offload);
    for (int j = 0; j <= L.m; ++j)
      Z(border, L.x(i, j)) = Z(L.x(i, j), border);
    Z(border, L.theta(i)) = th;
  }

  // Honest re-measurement on the polished matrix.
  sol.primal_objective = trace_product(form.objective, Z);
  sol.max_eq_residual = 0;
  sol.max_ineq_violation = 0;
  auto measure = [&](const SdpConstraint& c) {
    const double v = sdp_violation(c, Z);
    const double denom = std::max(1.0, std::abs(c.rhs));
    if (c.equality) {
      sol.max_eq_residual = std::max(sol.max_eq_residual, std::abs(v) / denom);
    } else {
      sol.max_ineq_violation =
          std::max(sol.max_ineq_violation, std::max(v, 0.0) / denom);
    }
  };
  for (const SdpConstraint& c : form.constraints) measure(c);
  measure(form.corner);
  sol.min_entry = Z.minCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z, Eigen::EigenvaluesOnly);
  sol.min_eigenvalue = es.eigenvalues().minCoeff();
  return sol;
}

Marginals extract_marginals(const Eigen::MatrixXd& Z,
                            const Scenario& scenario) {
  const QcqpLayout L{scenario.n_users(), scenario.n_caps()};
  const int border = L.dim();
  Marginals out;
  out.site = Eigen::MatrixXd::Zero(L.n, L.m + 1);
  out.cloud = Eigen::VectorXd::Zero(L.n);
  for (int i = 0; i < L.n; ++i) {
    const Task& t = scenario.tasks[i];
    double sum = 0;
    for (int j = 0; j <= L.m; ++j) {
      const double raw = (j > 0 && t.is_forbidden(j))
                             ? 0.0
                             : clamp01(Z(L.x(i, j), border));
      out.site(i, j) = raw;
      sum += raw;
    }
    if (sum < 1e-12) {
      double permitted = 1;
      for (int j = 1; j <= L.m; ++j) permitted += !t.is_forbidden(j);
      for (int j = 0; j <= L.m; ++j)
        out.site(i, j) = (j == 0 || !t.is_forbidden(j)) ? 1.0 / permitted : 0.0;
    } else {
      out.site.row(i) /= sum;
    }
    const double p_local = out.site(i, 0);
    if (p_local >= 1.0 - 1e-9) {
      out.cloud[i] = 0.0;
    } else {
      out.cloud[i] = clamp01(clamp01(Z(L.theta(i), border)) / (1.0 - p_local));
    }
  }
  return out;
}

std::vector<StrategyProfile> round_trials(const Marginals& m, int trials,
                                          std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("round_trials: trials < 1");
  const int n = static_cast<int>(m.site.rows());
  const int sites = static_cast<int>(m.site.cols());
  std::vector<StrategyProfile> out;
  out.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(t)));
    StrategyProfile p(n, Strategy::local());
    for (int i = 0; i < n; ++i) {
      const double u = rng.u01();
      int pick = 0;
      double cum = 0;
      bool chosen = false;
      for (int j = 0; j < sites; ++j) {
        cum += m.site(i, j);
        if (u < cum) {
          pick = j;
          chosen = true;
          break;
        }
      }
      if (!chosen) {
        // Rounding dust: take the last site carrying mass.
        for (int j = sites - 1; j >= 0; --j)
          if (m.site(i, j) > 0) {
            pick = j;
            break;
          }
      }
      if (pick == 0) {
        p[i] = Strategy::local();  // no cloud draw for local sites
      } else {
        p[i] = Strategy::cap(pick, rng.u01() < m.cloud[i]);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

Solution mcap(const Scenario& scenario, const McapOptions& opts) {
  if (opts.trials < 1) throw std::invalid_argument("mcap: trials < 1");
  Solution out;
  out.meta.method = "mcap";
  out.meta.seed = opts.seed;

  // Any feasible objective bounds the optimal round time entries; all-local
  // is always feasible and cheap to evaluate.
  const StrategyProfile all_local(scenario.n_users(), Strategy::local());
  const double ceiling =
      optimize_allocation(all_local, scenario, opts.alloc_tol).costs.objective;

  const Scenario scaled = scaled_units(scenario);
  const QcqpForm q = assemble_qcqp(scaled);
  SdpForm form = lift_to_sdp(q);
  apply_certificate_bounds(form, scaled, ceiling);

  SdpSolveOptions sopts;
  sopts.tol = opts.sdp_tol;
  sopts.max_iter = opts.sdp_max_iter;
  const SdpSolution sol = solve_sdp(form, scaled, sopts);
  out.meta.sdp_status = status_name(sol.status);
  out.meta.sdp_iterations = sol.iterations;
  if (sol.certificate_valid) {
    // The objective is a sum of nonnegative terms, so zero is always a
    // valid floor for the bound.
    out.meta.sdp_objective = std::max(0.0, sol.certified_lower_bound);
    out.meta.sdp_bound_valid = true;
  }

  if (sol.status == SdpStatus::Failed) {
    if (!opts.fallback)
      throw SolverFailure("mcap: lifted solve failed: " + sol.message);
    Rng rng(hash_combine(opts.seed, 0x66616c6cULL));
    out.profile = random_profile(scenario, rng);
    const AllocResult r =
        optimize_allocation(out.profile, scenario, opts.alloc_tol);
    out.allocation = r.allocation;
    out.costs = r.costs;
    out.meta.used_fallback = true;
    return out;
  }

  const Marginals marg = extract_marginals(sol.Z, scenario);
  const std::vector<StrategyProfile> trials =
      round_trials(marg, opts.trials, opts.seed);
  out.meta.trials = opts.trials;

  double best = std::numeric_limits<double>::infinity();
  for (const StrategyProfile& p : trials) {
    const AllocResult r = optimize_allocation(p, scenario, opts.alloc_tol);
    if (r.costs.objective < best) {
      best = r.costs.objective;
      out.profile = p;
      out.allocation = r.allocation;
      out.costs = r.costs;
    }
  }
  return out;
}

}  // namespace mcap
