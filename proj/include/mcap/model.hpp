#pragma once

#include <string>
#include <vector>

// Problem-instance data model for the multi-user multi-CAP offloading system
// and exact evaluation of delay / energy / objective formulas.
//
// Conventions used across the whole library:
//  - users are 0-based (i in [0, N));
//  - execution sites are 0 = local device, 1..M = CAP j;
//  - all quantities are SI internally: bits, Hz, cycles/s, seconds, joules.

namespace mcap {

struct Task {
  double d_in = 0;        // input data size, bits
  double d_out = 0;       // output data size, bits
  double cycles = 0;      // required processing cycles
  double alpha = 0;       // energy-vs-time weight, s/J
  double beta = 0;        // cloud-utility weight, J per utility unit
  double cloud_utility = 0;  // utility units charged when forwarding to cloud

  std::vector<double> eta_up;    // spectral efficiency per CAP, bits/s/Hz
  std::vector<double> eta_down;  // size M each

  std::vector<int> forbidden;  // sorted CAP ids in 1..M the user may not use

  double local_time_per_bit = 0;    // s/bit
  double local_energy_per_bit = 0;  // J/bit
  double tx_energy_per_bit = 0;     // J/bit (uplink)
  double rx_energy_per_bit = 0;     // J/bit (downlink)

  bool is_forbidden(int cap) const;

  double local_time() const { return local_time_per_bit * d_in; }
  double local_energy() const { return local_energy_per_bit * d_in; }
  double tx_energy() const { return tx_energy_per_bit * d_in; }
  double rx_energy() const { return rx_energy_per_bit * d_out; }
};

struct CapSpec {
  double c_ul = 0;     // uplink bandwidth capacity, Hz
  double c_dl = 0;     // downlink bandwidth capacity, Hz
  double c_total = 0;  // combined bandwidth capacity, Hz
  double f_a = 0;      // CAP processing capacity, cycles/s
};

struct CloudSpec {
  double f_c = 0;   // per-user cloud processing rate, cycles/s (uncontended)
  double r_ac = 0;  // CAP-to-cloud link rate, bits/s
};

struct Scenario {
  std::vector<Task> tasks;
  std::vector<CapSpec> caps;
  CloudSpec cloud;

  int n_users() const { return static_cast<int>(tasks.size()); }
  int n_caps() const { return static_cast<int>(caps.size()); }

  // Throws std::invalid_argument on any violated structural invariant
  // (empty task list, non-positive capacity, eta size mismatch, c_ul or
  // c_dl above c_total, forbidden id out of range, ...).
  void validate() const;
};

struct Strategy {
  int site = 0;        // 0 = local, 1..M = CAP
  bool cloud = false;  // forward to cloud via the chosen CAP

  static Strategy local() { return {0, false}; }
  static Strategy cap(int j, bool via_cloud) { return {j, via_cloud}; }

  bool is_local() const { return site == 0; }
  bool on_cap() const { return site > 0; }

  bool operator==(const Strategy&) const = default;
};

// "local", "cap2", "cap1+cloud": used in traces and CLI output.
std::string to_string(const Strategy& s);

// Joint action: one strategy per user, indexed by user.
using StrategyProfile = std::vector<Strategy>;

struct Allocation {
  int n = 0, m = 0;
  std::vector<double> up, down, f;  // row-major N x M

  static Allocation zeros(int n_users, int n_caps);

  // j is the 1-based CAP id, matching Strategy::site.
  double& c_up(int i, int j) { return up[idx(i, j)]; }
  double& c_down(int i, int j) { return down[idx(i, j)]; }
  double& f_cap(int i, int j) { return f[idx(i, j)]; }
  double c_up(int i, int j) const { return up[idx(i, j)]; }
  double c_down(int i, int j) const { return down[idx(i, j)]; }
  double f_cap(int i, int j) const { return f[idx(i, j)]; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * m + (j - 1);
  }
};

struct CostBreakdown {
  std::vector<double> energy;  // per-user energy-equivalent cost, J
  std::vector<double> delay;   // per-user completion time, s
  double round_time = 0;       // max over delay[]
  double objective = 0;        // sum_i alpha_i * energy[i] + round_time
};

struct Violation {
  int user;
  std::string constraint;  // "one-site", "cloud-needs-cap", "placement"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the per-user strategy constraints: a legal site, cloud forwarding
// only through a CAP, and no forbidden CAP. Throws std::invalid_argument if
// profile length does not match the scenario.
ValidationReport validate_profile(const StrategyProfile& profile,
                                  const Scenario& scenario);

// Exact cost evaluation for a fixed profile and allocation.
//
// delay_i = T_local                                     (local)
//         = d_in/(eta_u c_up) + d_out/(eta_d c_down)
//           + Y/f_cap                                   (CAP-processed)
//           + (d_in+d_out)/r_ac + Y/f_c  instead of Y/f_cap  (cloud)
// energy_i = E_local | E_tx + E_rx (+ beta * cloud_utility when cloud)
//
// Throws std::domain_error if an assigned user has a zero share of a
// resource they need (never returns infinities).
CostBreakdown evaluate(const StrategyProfile& profile, const Allocation& alloc,
                       const Scenario& scenario);

// Individual cost u_i = alpha_i * energy_i + round_time; the round time is
// the shared max over all users' delays.
double individual_cost(int i, const StrategyProfile& profile,
                       const Allocation& alloc, const Scenario& scenario);

// Energy of one user under a strategy. Allocation-independent: bandwidth and
// CPU shares never enter the energy model.
double strategy_energy(const Task& task, const Strategy& s);

// Fixed delay of the CAP-to-cloud leg: (d_in + d_out)/r_ac + cycles/f_c.
double cloud_chain_delay(const Task& task, const CloudSpec& cloud);

}  // namespace mcap
