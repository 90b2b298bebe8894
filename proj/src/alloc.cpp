#include "mcap/alloc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Member {
  int user;
  double A, B;  // d_in/eta_up, d_out/eta_down (Hz * s)
  double G;     // cycles to process on the CAP, 0 when cloud-forwarded
  double base;  // fixed cloud-chain delay, 0 when CAP-processed
};

struct Group {
  int cap = 0;  // 1-based
  std::vector<Member> members;
};

std::vector<Group> build_groups(const StrategyProfile& profile,
                                const Scenario& scenario) {
  std::vector<Group> groups(scenario.n_caps());
  for (int j = 1; j <= scenario.n_caps(); ++j) groups[j - 1].cap = j;
  for (int i = 0; i < scenario.n_users(); ++i) {
    const Strategy& s = profile[i];
    if (!s.on_cap()) continue;
    const Task& t = scenario.tasks[i];
    Member m;
    m.user = i;
    m.A = t.d_in / t.eta_up[s.site - 1];
    m.B = t.d_out / t.eta_down[s.site - 1];
    m.G = s.cloud ? 0.0 : t.cycles;
    m.base = s.cloud ? cloud_chain_delay(t, scenario.cloud) : 0.0;
    groups[s.site - 1].members.push_back(m);
  }
  return groups;
}

struct GroupSolution {
  double t = 0;
  double gap = 0;
  bool converged = true;
  // (c_up, c_down, f) in SI units, aligned with Group::members.
  std::vector<std::array<double, 3>> shares;
};

// Log-barrier Newton solve of one CAP group's epigraph problem. Variables
// are capacity-scaled so everything is O(1); tol is relative on the group's
// round time.
GroupSolution solve_group(const Group& group, const CapSpec& cap, double tol) {
  const int k = static_cast<int>(group.members.size());
  const double su = std::min(cap.c_ul, cap.c_total);
  const double sd = std::min(cap.c_dl, cap.c_total);

  // Variable layout: v[0] = t, then per member xu, xd and xf for processors.
  std::vector<int> iu(k), id(k), if_(k, -1);
  int dim = 1;
  int n_proc = 0;
  for (int q = 0; q < k; ++q) {
    iu[q] = dim++;
    id[q] = dim++;
    if (group.members[q].G > 0) {
      if_[q] = dim++;
      ++n_proc;
    }
  }

  std::vector<double> Abar(k), Bbar(k), Gbar(k);
  for (int q = 0; q < k; ++q) {
    Abar[q] = group.members[q].A / su;
    Bbar[q] = group.members[q].B / sd;
    Gbar[q] = group.members[q].G / cap.f_a;
  }

  // Capacity rows in scaled variables: sum xu <= cu_lim, sum xd <= cd_lim,
  // total-bandwidth row, sum xf <= 1.
  const double cu_lim = cap.c_ul / su;
  const double cd_lim = cap.c_dl / sd;
  const double wu = su / cap.c_total;
  const double wd = sd / cap.c_total;
  const int n_capacity = n_proc > 0 ? 4 : 3;
  const int m_barrier = k + n_capacity;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  {
    const double frac = 0.9 * std::min(1.0, cap.c_total / (cap.c_ul + cap.c_dl));
    double t0 = 0;
    for (int q = 0; q < k; ++q) {
      v[iu[q]] = frac * cu_lim / k;
      v[id[q]] = frac * cd_lim / k;
      if (if_[q] >= 0) v[if_[q]] = 0.9 / n_proc;
      double phi = Abar[q] / v[iu[q]] + Bbar[q] / v[id[q]];
      if (if_[q] >= 0) phi += Gbar[q] / v[if_[q]];
      t0 = std::max(t0, group.members[q].base + phi);
    }
    v[0] = 1.1 * t0 + 1e-9;
  }

  // Barrier value, or +inf when v leaves the strictly feasible region.
  const auto barrier = [&](const Eigen::VectorXd& x, double tau) -> double {
    for (int p = 1; p < dim; ++p)
      if (x[p] <= 0) return kInf;
    double val = tau * x[0];
    for (int q = 0; q < k; ++q) {
      double phi = Abar[q] / x[iu[q]] + Bbar[q] / x[id[q]];
      if (if_[q] >= 0) phi += Gbar[q] / x[if_[q]];
      const double r = x[0] - group.members[q].base - phi;
      if (r <= 0) return kInf;
      val -= std::log(r);
    }
    double s_u = cu_lim, s_d = cd_lim, s_t = 1.0, s_f = 1.0;
    for (int q = 0; q < k; ++q) {
      s_u -= x[iu[q]];
      s_d -= x[id[q]];
      s_t -= wu * x[iu[q]] + wd * x[id[q]];
      if (if_[q] >= 0) s_f -= x[if_[q]];
    }
    if (s_u <= 0 || s_d <= 0 || s_t <= 0) return kInf;
    val -= std::log(s_u) + std::log(s_d) + std::log(s_t);
    if (n_proc > 0) {
      if (s_f <= 0) return kInf;
      val -= std::log(s_f);
    }
    return val;
  };

  double tau = m_barrier / std::max(v[0], 1e-6);
  const double tol_eff = std::min(tol, 1e-9);
  bool converged = true;

  Eigen::VectorXd g(dim), grad_r(dim), delta(dim);
  Eigen::MatrixXd H(dim, dim);
  for (int outer = 0; outer < 60; ++outer) {
    // Center at the current tau.
    double decrement = kInf;
    for (int it = 0; it < 60; ++it) {
      g.setZero();
      H.setZero();
      g[0] = tau;
      for (int q = 0; q < k; ++q) {
        double phi = Abar[q] / v[iu[q]] + Bbar[q] / v[id[q]];
        if (if_[q] >= 0) phi += Gbar[q] / v[if_[q]];
        const double r = v[0] - group.members[q].base - phi;
        grad_r.setZero();
        grad_r[0] = 1.0;
        grad_r[iu[q]] = Abar[q] / (v[iu[q]] * v[iu[q]]);
        grad_r[id[q]] = Bbar[q] / (v[id[q]] * v[id[q]]);
        if (if_[q] >= 0) grad_r[if_[q]] = Gbar[q] / (v[if_[q]] * v[if_[q]]);
        g -= grad_r / r;
        H += (grad_r * grad_r.transpose()) / (r * r);
        H(iu[q], iu[q]) += 2 * Abar[q] / (std::pow(v[iu[q]], 3) * r);
        H(id[q], id[q]) += 2 * Bbar[q] / (std::pow(v[id[q]], 3) * r);
        if (if_[q] >= 0)
          H(if_[q], if_[q]) += 2 * Gbar[q] / (std::pow(v[if_[q]], 3) * r);
      }
      double s_u = cu_lim, s_d = cd_lim, s_t = 1.0, s_f = 1.0;
      for (int q = 0; q < k; ++q) {
        s_u -= v[iu[q]];
        s_d -= v[id[q]];
        s_t -= wu * v[iu[q]] + wd * v[id[q]];
        if (if_[q] >= 0) s_f -= v[if_[q]];
      }
      for (int q = 0; q < k; ++q) {
        g[iu[q]] += 1.0 / s_u + wu / s_t;
        g[id[q]] += 1.0 / s_d + wd / s_t;
        if (if_[q] >= 0) g[if_[q]] += 1.0 / s_f;
      }
      for (int q = 0; q < k; ++q)
        for (int q2 = 0; q2 < k; ++q2) {
          H(iu[q], iu[q2]) += 1.0 / (s_u * s_u) + wu * wu / (s_t * s_t);
          H(id[q], id[q2]) += 1.0 / (s_d * s_d) + wd * wd / (s_t * s_t);
          H(iu[q], id[q2]) += wu * wd / (s_t * s_t);
          H(id[q], iu[q2]) += wu * wd / (s_t * s_t);
          if (if_[q] >= 0 && if_[q2] >= 0)
            H(if_[q], if_[q2]) += 1.0 / (s_f * s_f);
        }

      Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() != Eigen::Success) {
        H.diagonal().array() += 1e-10 * (1.0 + H.diagonal().maxCoeff());
        llt.compute(H);
      }
      delta = llt.solve(-g);
      decrement = -g.dot(delta);
      if (!(decrement > 2e-13)) break;

      const double b0 = barrier(v, tau);
      double step = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        const double b1 = barrier(v + step * delta, tau);
        if (b1 <= b0 - 0.25 * step * decrement) break;
        step *= 0.5;
        if (step < 1e-18) { step = 0; break; }
      }
      if (step == 0) break;
      v += step * delta;
    }
    const double target = tol_eff * std::max(1.0, v[0]);
    if (m_barrier / tau <= target) {
      converged = decrement < 1e-6;
      break;
    }
    tau *= 20;
    if (outer == 59) converged = false;
  }

  GroupSolution out;
  out.t = v[0];
  out.gap = m_barrier / tau;
  out.converged = converged;
  out.shares.resize(k);
  for (int q = 0; q < k; ++q) {
    out.shares[q][0] = su * v[iu[q]];
    out.shares[q][1] = sd * v[id[q]];
    out.shares[q][2] = if_[q] >= 0 ? cap.f_a * v[if_[q]] : 0.0;
  }
  return out;
}

double member_travel_time(const Member& m, const std::array<double, 3>& share) {
  double phi = m.A / share[0] + m.B / share[1];
  if (m.G > 0) phi += m.G / share[2];
  return phi;
}

// Closed-form single-user optimum used for the oracle's lower bracket: split
// min(c_total, c_ul + c_dl) between uplink and downlink proportionally to
// sqrt of the demands, clipped to the individual caps; full CPU.
double uncontended_delay(const Member& m, const CapSpec& cap) {
  double cu, cd;
  if (cap.c_ul + cap.c_dl <= cap.c_total) {
    cu = cap.c_ul;
    cd = cap.c_dl;
  } else {
    const double sa = std::sqrt(m.A), sb = std::sqrt(m.B);
    cu = cap.c_total * sa / (sa + sb);
    cu = std::clamp(cu, cap.c_total - cap.c_dl, cap.c_ul);
    cd = cap.c_total - cu;
  }
  double d = m.base + m.A / cu + m.B / cd;
  if (m.G > 0) d += m.G / cap.f_a;
  return d;
}

// Best CPU split for fixed bandwidths: minimize max_q(K_q + G_q/f_q) with
// sum f = f_a, by bisection on the common completion time.
double cpu_split_time(const std::vector<double>& K, const std::vector<double>& G,
                      double f_a) {
  double k_max = -kInf, g_sum = 0;
  for (std::size_t q = 0; q < K.size(); ++q) {
    k_max = std::max(k_max, K[q]);
    g_sum += G[q];
  }
  double lo = k_max, hi = k_max + g_sum / f_a;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    double need = 0;
    for (std::size_t q = 0; q < K.size(); ++q) need += G[q] / (mid - K[q]);
    (need > f_a ? lo : hi) = mid;
  }
  return hi;
}

// All share vectors (one entry per member, each a positive multiple of step,
// summing to at most lim).
void gen_share_vectors(int k, long n_lim, double step, std::vector<long>& cur,
                       std::vector<std::vector<double>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    std::vector<double> v(k);
    for (int q = 0; q < k; ++q) v[q] = cur[q] * step;
    out.push_back(std::move(v));
    return;
  }
  const int remaining = k - static_cast<int>(cur.size()) - 1;
  for (long c = 1; c <= n_lim - remaining; ++c) {
    cur.push_back(c);
    gen_share_vectors(k, n_lim - c, step, cur, out);
    cur.pop_back();
  }
}

double grid_min_group(const Group& group, const CapSpec& cap, double step) {
  const int k = static_cast<int>(group.members.size());
  const double su = std::min(cap.c_ul, cap.c_total);
  const double sd = std::min(cap.c_dl, cap.c_total);
  const long nu = static_cast<long>(std::floor(su / step + 1e-9));
  const long nd = static_cast<long>(std::floor(sd / step + 1e-9));
  if (nu < k || nd < k)
    throw std::invalid_argument("allocation_oracle: grid too coarse");

  std::vector<std::vector<double>> ups, downs;
  std::vector<long> cur;
  gen_share_vectors(k, nu, step, cur, ups);
  gen_share_vectors(k, nd, step, cur, downs);

  std::vector<double> K(k), G;
  std::vector<int> proc;
  for (int q = 0; q < k; ++q)
    if (group.members[q].G > 0) proc.push_back(q);

  double best = kInf;
  for (const auto& u : ups) {
    double s_u = 0;
    for (double x : u) s_u += x;
    for (const auto& d : downs) {
      double s_d = 0;
      for (double x : d) s_d += x;
      if (s_u + s_d > cap.c_total + 1e-9) continue;
      double k_all = -kInf;
      for (int q = 0; q < k; ++q) {
        K[q] = group.members[q].base + group.members[q].A / u[q] +
               group.members[q].B / d[q];
        k_all = std::max(k_all, K[q]);
      }
      if (k_all >= best) continue;  // CPU split cannot go below max K
      double value;
      if (proc.empty()) {
        value = k_all;
      } else {
        std::vector<double> kp, gp;
        double k_rest = -kInf;
        for (int q = 0; q < k; ++q) {
          if (group.members[q].G > 0) {
            kp.push_back(K[q]);
            gp.push_back(group.members[q].G);
          } else {
            k_rest = std::max(k_rest, K[q]);
          }
        }
        value = std::max(cpu_split_time(kp, gp, cap.f_a), k_rest);
      }
      best = std::min(best, value);
    }
  }
  return best;
}

}  // namespace

AllocResult optimize_allocation(const StrategyProfile& profile,
                                const Scenario& scenario, double tol) {
  scenario.validate();
  if (tol <= 0) throw std::invalid_argument("optimize_allocation: tol <= 0");
  if (!validate_profile(profile, scenario).ok())
    throw std::invalid_argument("optimize_allocation: invalid profile");

  const std::vector<Group> groups = build_groups(profile, scenario);
  AllocResult result;
  result.allocation = Allocation::zeros(scenario.n_users(), scenario.n_caps());

  double t_global = 0;
  for (int i = 0; i < scenario.n_users(); ++i)
    if (profile[i].is_local())
      t_global = std::max(t_global, scenario.tasks[i].local_time());

  std::vector<GroupSolution> solved(groups.size());
  result.converged = true;
  result.residual = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (groups[gi].members.empty()) continue;
    solved[gi] = solve_group(groups[gi], scenario.caps[gi], tol);
    result.converged = result.converged && solved[gi].converged;
    result.residual = std::max(result.residual, solved[gi].gap);
    t_global = std::max(t_global, solved[gi].t);
  }

  // Tie-break: scale each member down to put their delay exactly at the
  // round time; surplus in non-bottleneck groups is not handed out.
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& group = groups[gi];
    for (std::size_t q = 0; q < group.members.size(); ++q) {
      const Member& m = group.members[q];
      auto share = solved[gi].shares[q];
      const double phi = member_travel_time(m, share);
      const double den = t_global - m.base;
      if (den > 0) {
        const double gamma = std::min(1.0, phi / den);
        for (double& x : share) x *= gamma;
      }
      result.allocation.c_up(m.user, group.cap) = share[0];
      result.allocation.c_down(m.user, group.cap) = share[1];
      result.allocation.f_cap(m.user, group.cap) = share[2];
    }
  }

  result.costs = evaluate(profile, result.allocation, scenario);
  return result;
}

AllocBracket allocation_oracle(const StrategyProfile& profile,
                               const Scenario& scenario, double grid_step_hz) {
  scenario.validate();
  if (grid_step_hz <= 0)
    throw std::invalid_argument("allocation_oracle: grid step <= 0");
  if (!validate_profile(profile, scenario).ok())
    throw std::invalid_argument("allocation_oracle: invalid profile");
  if (scenario.n_caps() > 2)
    throw std::invalid_argument("allocation_oracle: at most 2 CAPs supported");

  const std::vector<Group> groups = build_groups(profile, scenario);
  for (const Group& g : groups)
    if (g.members.size() > 3)
      throw std::invalid_argument(
          "allocation_oracle: at most 3 users per CAP supported");

  double energy = 0;
  for (int i = 0; i < scenario.n_users(); ++i)
    energy +=
        scenario.tasks[i].alpha * strategy_energy(scenario.tasks[i], profile[i]);

  double local_max = 0;
  for (int i = 0; i < scenario.n_users(); ++i)
    if (profile[i].is_local())
      local_max = std::max(local_max, scenario.tasks[i].local_time());

  double lower_delay = local_max, upper_delay = local_max;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (groups[gi].members.empty()) continue;
    const CapSpec& cap = scenario.caps[gi];
    for (const Member& m : groups[gi].members)
      lower_delay = std::max(lower_delay, uncontended_delay(m, cap));
    upper_delay =
        std::max(upper_delay, grid_min_group(groups[gi], cap, grid_step_hz));
  }
  return {energy + lower_delay, energy + upper_delay};
}

}  // namespace mcap
