#include "mcap/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcap {

bool Task::is_forbidden(int cap) const {
  return std::binary_search(forbidden.begin(), forbidden.end(), cap);
}

std::string to_string(const Strategy& s) {
  if (s.is_local()) return "local";
  std::string out = "cap" + std::to_string(s.site);
  if (s.cloud) out += "+cloud";
  return out;
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("scenario: " + msg);
}

}  // namespace

void Scenario::validate() const {
  require(!tasks.empty(), "need at least one user");
  require(!caps.empty(), "need at least one CAP");
  const int m = n_caps();
  for (int i = 0; i < n_users(); ++i) {
    const Task& t = tasks[i];
    const std::string who = "task " + std::to_string(i) + ": ";
    require(t.d_in > 0 && t.d_out > 0, who + "data sizes must be positive");
    require(t.cycles > 0, who + "cycles must be positive");
    require(t.alpha > 0, who + "alpha must be positive");
    require(t.beta >= 0 && t.cloud_utility >= 0,
            who + "cloud cost terms must be nonnegative");
    require(static_cast<int>(t.eta_up.size()) == m &&
                static_cast<int>(t.eta_down.size()) == m,
            who + "eta arrays must have one entry per CAP");
    for (double e : t.eta_up) require(e > 0, who + "eta_up must be positive");
    for (double e : t.eta_down)
      require(e > 0, who + "eta_down must be positive");
    require(t.local_time_per_bit > 0 && t.local_energy_per_bit > 0,
            who + "local time/energy per bit must be positive");
    require(t.tx_energy_per_bit > 0 && t.rx_energy_per_bit > 0,
            who + "tx/rx energy per bit must be positive");
    require(std::is_sorted(t.forbidden.begin(), t.forbidden.end()),
            who + "forbidden set must be sorted");
    for (int j : t.forbidden)
      require(j >= 1 && j <= m, who + "forbidden CAP id out of range");
    // A fully forbidden user is legal; they must process locally.
  }
  for (int j = 0; j < m; ++j) {
    const CapSpec& c = caps[j];
    const std::string who = "cap " + std::to_string(j + 1) + ": ";
    require(c.c_ul > 0 && c.c_dl > 0 && c.c_total > 0 && c.f_a > 0,
            who + "capacities must be positive");
    require(c.c_ul <= c.c_total && c.c_dl <= c.c_total,
            who + "c_ul and c_dl must not exceed c_total");
  }
  require(cloud.f_c > 0 && cloud.r_ac > 0, "cloud rates must be positive");
}

Allocation Allocation::zeros(int n_users, int n_caps) {
  Allocation a;
  a.n = n_users;
  a.m = n_caps;
  const std::size_t sz = static_cast<std::size_t>(n_users) * n_caps;
  a.up.assign(sz, 0.0);
  a.down.assign(sz, 0.0);
  a.f.assign(sz, 0.0);
  return a;
}

ValidationReport validate_profile(const StrategyProfile& profile,
                                  const Scenario& scenario) {
  if (profile.size() != scenario.tasks.size())
    throw std::invalid_argument("profile length does not match scenario");
  ValidationReport report;
  const int m = scenario.n_caps();
  for (int i = 0; i < scenario.n_users(); ++i) {
    const Strategy& s = profile[i];
    if (s.site < 0 || s.site > m) {
      report.violations.push_back(
          {i, "one-site", "site " + std::to_string(s.site) + " does not exist"});
      continue;
    }
    if (s.cloud && s.is_local())
      report.violations.push_back(
          {i, "cloud-needs-cap", "cloud forwarding requires a CAP site"});
    if (s.on_cap() && scenario.tasks[i].is_forbidden(s.site))
      report.violations.push_back(
          {i, "placement", "CAP " + std::to_string(s.site) + " is forbidden"});
  }
  return report;
}

double strategy_energy(const Task& task, const Strategy& s) {
  if (s.is_local()) return task.local_energy();
  double e = task.tx_energy() + task.rx_energy();
  if (s.cloud) e += task.beta * task.cloud_utility;
  return e;
}

double cloud_chain_delay(const Task& task, const CloudSpec& cloud) {
  return (task.d_in + task.d_out) / cloud.r_ac + task.cycles / cloud.f_c;
}

CostBreakdown evaluate(const StrategyProfile& profile, const Allocation& alloc,
                       const Scenario& scenario) {
  if (profile.size() != scenario.tasks.size())
    throw std::invalid_argument("profile length does not match scenario");
  const int n = scenario.n_users();
  CostBreakdown out;
  out.energy.resize(n);
  out.delay.resize(n);

  double weighted_energy = 0;
  double max_delay = 0;
  for (int i = 0; i < n; ++i) {
    const Task& t = scenario.tasks[i];
    const Strategy& s = profile[i];
    double delay;
    if (s.is_local()) {
      delay = t.local_time();
    } else {
      const int j = s.site;
      const double cu = alloc.c_up(i, j);
      const double cd = alloc.c_down(i, j);
      if (cu <= 0 || cd <= 0)
        throw std::domain_error("user " + std::to_string(i) +
                                " is on CAP " + std::to_string(j) +
                                " with zero bandwidth");
      delay = t.d_in / (t.eta_up[j - 1] * cu) + t.d_out / (t.eta_down[j - 1] * cd);
      if (s.cloud) {
        delay += cloud_chain_delay(t, scenario.cloud);
      } else {
        const double fc = alloc.f_cap(i, j);
        if (fc <= 0)
          throw std::domain_error("user " + std::to_string(i) +
                                  " is CAP-processed with zero CPU share");
        delay += t.cycles / fc;
      }
    }
    out.delay[i] = delay;
    out.energy[i] = strategy_energy(t, s);
    weighted_energy += t.alpha * out.energy[i];
    max_delay = std::max(max_delay, delay);
  }
  out.round_time = max_delay;
  out.objective = weighted_energy + max_delay;
  return out;
}

double individual_cost(int i, const StrategyProfile& profile,
                       const Allocation& alloc, const Scenario& scenario) {
  const CostBreakdown costs = evaluate(profile, alloc, scenario);
  return scenario.tasks[i].alpha * costs.energy[i] + costs.round_time;
}

}  // namespace mcap
