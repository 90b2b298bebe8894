#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mcap/model.hpp"

// Scenario generator for the experiment harness. All defaults match the
// simulation setup of the reference workload (an x264 CBR encoding task at
// 1900 cycles/byte on a 2.39 GHz handset offloading to 5 GHz CAPs and a
// 7.5 GHz cloud). Decimal prefixes throughout: MB = 1e6 bytes, MHz = 1e6 Hz,
// Mbps = 1e6 bits/s.
//
// Every random draw is keyed by (seed, round, field, user, cap), so two
// configs that differ in one knob still share all other draws. In
// particular a placement-constrained run and its unconstrained twin see
// identical tasks, which makes paired comparisons exact.

namespace mcap {

struct GeneratorConfig {
  int n_users = 10;  // placement experiments default to 12 instead
  int n_caps = 2;

  double cycles_per_byte = 1900.0;
  double d_in_mb_min = 10.0, d_in_mb_max = 30.0;   // input size, MB
  double d_out_mb_min = 1.0, d_out_mb_max = 3.0;   // output size, MB
  double alpha = 0.5;     // energy weight, s/J
  double beta = 1.7e-7;   // cloud-utility weight, J/bit
  double c_ul_mhz = 20.0, c_dl_mhz = 20.0, c_total_mhz = 40.0;
  double eta_min = 2.0, eta_max = 5.0;  // spectral efficiency, b/s/Hz
  double local_cpu = 2.39e9;   // handset CPU, cycles/s
  double cap_cpu = 5e9;        // per-CAP CPU, cycles/s
  double cloud_cpu = 7.5e9;    // per-user cloud CPU, cycles/s
  double tx_energy_per_bit = 1.42e-7;  // J/bit
  double rx_energy_per_bit = 1.42e-7;  // J/bit
  double r_ac_mbps = 15.0;     // CAP-to-cloud rate, Mbps

  // Required: the handset's computation energy per input bit. There is no
  // defensible default, so generation refuses until it is set.
  double local_energy_per_bit = 0.0;

  // When set, each user draws one forbidden CAP or none, all M + 1
  // outcomes equally likely.
  bool placement = false;

  int rounds = 50;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Deterministic in (cfg, round): round r of a config reproduces bit-exactly.
// Derived task fields: cycles = d_in bytes x cycles_per_byte, cloud utility
// = d_in bits, local_time_per_bit = cycles_per_byte / 8 / local_cpu. Uplink
// and downlink spectral efficiency share one draw per (user, CAP).
Scenario generate_scenario(const GeneratorConfig& cfg, int round);

// Reads a JSON object whose keys are the GeneratorConfig field names.
// Absent keys keep their defaults; unknown keys raise std::runtime_error to
// catch typos. Does not validate (flags may still override fields).
GeneratorConfig load_config(std::istream& in);
GeneratorConfig load_config(const std::string& path);

}  // namespace mcap
