#pragma once

#include <algorithm>
#include <cstdint>

#include "mcap/model.hpp"
#include "mcap/rng.hpp"

// Small hand-rolled instances for unit tests. Values sit in the same regime
// as the experiment defaults (tens of Mbit, tens of MHz, GHz-scale CPUs) but
// are drawn independently of the CLI generator so the two can cross-check
// each other.

namespace mcap::testing {

inline Task basic_task(int n_caps) {
  Task t;
  t.d_in = 1.6e8;  // 20 MB
  t.d_out = 1.6e7;
  t.cycles = t.d_in / 8.0 * 1900.0;
  t.alpha = 0.5;
  t.beta = 1.7e-7;
  t.cloud_utility = t.d_in;
  t.eta_up.assign(n_caps, 3.5);
  t.eta_down.assign(n_caps, 3.5);
  t.local_time_per_bit = 9.93e-8;
  t.local_energy_per_bit = 2.3e-7;
  t.tx_energy_per_bit = 1.42e-7;
  t.rx_energy_per_bit = 1.42e-7;
  return t;
}

inline CapSpec basic_cap() { return {20e6, 20e6, 40e6, 5e9}; }

inline Scenario basic_scenario(int n_users, int n_caps) {
  Scenario s;
  for (int i = 0; i < n_users; ++i) s.tasks.push_back(basic_task(n_caps));
  for (int j = 0; j < n_caps; ++j) s.caps.push_back(basic_cap());
  s.cloud = {7.5e9, 15e6};
  return s;
}

inline Scenario random_scenario(int n_users, int n_caps, std::uint64_t seed,
                                bool with_placement = false) {
  Rng rng(seed);
  Scenario s = basic_scenario(n_users, n_caps);
  for (Task& t : s.tasks) {
    t.d_in = rng.uniform(0.8e8, 2.4e8);
    t.d_out = rng.uniform(0.8e7, 2.4e7);
    t.cycles = t.d_in / 8.0 * 1900.0;
    t.cloud_utility = t.d_in;
    for (int j = 0; j < n_caps; ++j) {
      t.eta_up[j] = rng.uniform(2.0, 5.0);
      t.eta_down[j] = rng.uniform(2.0, 5.0);
    }
    if (with_placement && rng.u01() < 0.5)
      t.forbidden = {static_cast<int>(rng.index(n_caps)) + 1};
  }
  return s;
}

// Uniform random valid profile, independent of the library's own samplers.
inline StrategyProfile random_valid_profile(const Scenario& s, Rng& rng) {
  StrategyProfile p;
  for (const Task& t : s.tasks) {
    std::vector<Strategy> options = {Strategy::local()};
    for (int j = 1; j <= s.n_caps(); ++j)
      if (!t.is_forbidden(j)) {
        options.push_back(Strategy::cap(j, false));
        options.push_back(Strategy::cap(j, true));
      }
    p.push_back(options[rng.index(options.size())]);
  }
  return p;
}

// Feasible allocation that splits each CAP's capacities evenly among its
// assigned users (90% of capacity, so strict feasibility holds).
inline Allocation equal_split_allocation(const StrategyProfile& p,
                                         const Scenario& s) {
  Allocation a = Allocation::zeros(s.n_users(), s.n_caps());
  for (int j = 1; j <= s.n_caps(); ++j) {
    int members = 0, processors = 0;
    for (int i = 0; i < s.n_users(); ++i)
      if (p[i].site == j) {
        ++members;
        if (!p[i].cloud) ++processors;
      }
    if (members == 0) continue;
    const CapSpec& cap = s.caps[j - 1];
    const double frac =
        0.9 * std::min(1.0, cap.c_total / (cap.c_ul + cap.c_dl));
    for (int i = 0; i < s.n_users(); ++i)
      if (p[i].site == j) {
        a.c_up(i, j) = frac * cap.c_ul / members;
        a.c_down(i, j) = frac * cap.c_dl / members;
        if (!p[i].cloud) a.f_cap(i, j) = 0.9 * cap.f_a / processors;
      }
  }
  return a;
}

}  // namespace mcap::testing
