#include "mcap/generate.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mcap/rng.hpp"

namespace mcap {

namespace {

constexpr double kMega = 1e6;

// Field tags for the per-draw seed chain. Values are arbitrary but frozen:
// changing them would silently change every generated scenario.
enum FieldTag : std::uint64_t {
  kDrawDin = 1,
  kDrawDout = 2,
  kDrawEta = 3,
  kDrawPlacement = 4,
};

// One value per (seed, round, field, user, cap); the draw does not depend
// on any other draw's existence, so configs differing in one knob (say
// placement) still agree on everything else.
double field_uniform(std::uint64_t round_seed, FieldTag tag, int i, int j,
                     double lo, double hi) {
  std::uint64_t s = hash_combine(round_seed, static_cast<std::uint64_t>(tag));
  s = hash_combine(s, static_cast<std::uint64_t>(i));
  s = hash_combine(s, static_cast<std::uint64_t>(j));
  return Rng(s).uniform(lo, hi);
}

std::size_t field_index(std::uint64_t round_seed, FieldTag tag, int i,
                        std::size_t n) {
  std::uint64_t s = hash_combine(round_seed, static_cast<std::uint64_t>(tag));
  s = hash_combine(s, static_cast<std::uint64_t>(i));
  return Rng(s).index(n);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("generator config: " + what);
}

}  // namespace

void GeneratorConfig::validate() const {
  require(n_users >= 1, "n_users must be at least 1");
  require(n_caps >= 1, "n_caps must be at least 1");
  require(cycles_per_byte > 0, "cycles_per_byte must be positive");
  require(d_in_mb_min > 0 && d_in_mb_max >= d_in_mb_min,
          "d_in range must be positive and ordered");
  require(d_out_mb_min > 0 && d_out_mb_max >= d_out_mb_min,
          "d_out range must be positive and ordered");
  require(alpha > 0, "alpha must be positive");
  require(beta >= 0, "beta must be nonnegative");
  require(c_ul_mhz > 0 && c_dl_mhz > 0 && c_total_mhz > 0,
          "bandwidth capacities must be positive");
  require(c_ul_mhz <= c_total_mhz && c_dl_mhz <= c_total_mhz,
          "per-direction bandwidth must not exceed the total");
  require(eta_min > 0 && eta_max >= eta_min,
          "eta range must be positive and ordered");
  require(local_cpu > 0 && cap_cpu > 0 && cloud_cpu > 0,
          "CPU rates must be positive");
  require(tx_energy_per_bit >= 0 && rx_energy_per_bit >= 0,
          "transceiver energies must be nonnegative");
  require(r_ac_mbps > 0, "r_ac must be positive");
  require(local_energy_per_bit > 0,
          "local_energy_per_bit is required and has no default; "
          "set it in the config file or with --local-energy-per-bit");
  require(rounds >= 1, "rounds must be at least 1");
}

Scenario generate_scenario(const GeneratorConfig& cfg, int round) {
  cfg.validate();
  if (round < 0) throw std::invalid_argument("generator config: round < 0");

  const std::uint64_t rs =
      hash_combine(cfg.seed, static_cast<std::uint64_t>(round));

  Scenario s;
  s.tasks.reserve(cfg.n_users);
  for (int i = 0; i < cfg.n_users; ++i) {
    Task t;
    const double d_in_mb =
        field_uniform(rs, kDrawDin, i, 0, cfg.d_in_mb_min, cfg.d_in_mb_max);
    const double d_out_mb =
        field_uniform(rs, kDrawDout, i, 0, cfg.d_out_mb_min, cfg.d_out_mb_max);
    t.d_in = d_in_mb * kMega * 8.0;    // MB -> bits
    t.d_out = d_out_mb * kMega * 8.0;
    t.cycles = d_in_mb * kMega * cfg.cycles_per_byte;
    t.alpha = cfg.alpha;
    t.beta = cfg.beta;
    t.cloud_utility = t.d_in;
    t.eta_up.resize(cfg.n_caps);
    t.eta_down.resize(cfg.n_caps);
    for (int j = 0; j < cfg.n_caps; ++j) {
      const double eta =
          field_uniform(rs, kDrawEta, i, j, cfg.eta_min, cfg.eta_max);
      t.eta_up[j] = eta;
      t.eta_down[j] = eta;
    }
    t.local_time_per_bit = cfg.cycles_per_byte / 8.0 / cfg.local_cpu;
    t.local_energy_per_bit = cfg.local_energy_per_bit;
    t.tx_energy_per_bit = cfg.tx_energy_per_bit;
    t.rx_energy_per_bit = cfg.rx_energy_per_bit;
    if (cfg.placement) {
      const std::size_t pick = field_index(
          rs, kDrawPlacement, i, static_cast<std::size_t>(cfg.n_caps) + 1);
      if (pick > 0) t.forbidden = {static_cast<int>(pick)};
    }
    s.tasks.push_back(std::move(t));
  }

  s.caps.assign(cfg.n_caps, CapSpec{cfg.c_ul_mhz * kMega, cfg.c_dl_mhz * kMega,
                                    cfg.c_total_mhz * kMega, cfg.cap_cpu});
  s.cloud = CloudSpec{cfg.cloud_cpu, cfg.r_ac_mbps * kMega};
  s.validate();
  return s;
}

namespace {

GeneratorConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::runtime_error("config file: top level must be a JSON object");

  GeneratorConfig cfg;
  const std::set<std::string> known = {
      "n_users",        "n_caps",
      "cycles_per_byte", "d_in_mb_min",
      "d_in_mb_max",    "d_out_mb_min",
      "d_out_mb_max",   "alpha",
      "beta",           "c_ul_mhz",
      "c_dl_mhz",       "c_total_mhz",
      "eta_min",        "eta_max",
      "local_cpu",      "cap_cpu",
      "cloud_cpu",      "tx_energy_per_bit",
      "rx_energy_per_bit", "r_ac_mbps",
      "local_energy_per_bit", "placement",
      "rounds",         "seed"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw std::runtime_error("config file: unknown key \"" + item.key() +
                               "\"");

  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  auto integer = [&](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };

  integer("n_users", cfg.n_users);
  integer("n_caps", cfg.n_caps);
  num("cycles_per_byte", cfg.cycles_per_byte);
  num("d_in_mb_min", cfg.d_in_mb_min);
  num("d_in_mb_max", cfg.d_in_mb_max);
  num("d_out_mb_min", cfg.d_out_mb_min);
  num("d_out_mb_max", cfg.d_out_mb_max);
  num("alpha", cfg.alpha);
  num("beta", cfg.beta);
  num("c_ul_mhz", cfg.c_ul_mhz);
  num("c_dl_mhz", cfg.c_dl_mhz);
  num("c_total_mhz", cfg.c_total_mhz);
  num("eta_min", cfg.eta_min);
  num("eta_max", cfg.eta_max);
  num("local_cpu", cfg.local_cpu);
  num("cap_cpu", cfg.cap_cpu);
  num("cloud_cpu", cfg.cloud_cpu);
  num("tx_energy_per_bit", cfg.tx_energy_per_bit);
  num("rx_energy_per_bit", cfg.rx_energy_per_bit);
  num("r_ac_mbps", cfg.r_ac_mbps);
  num("local_energy_per_bit", cfg.local_energy_per_bit);
  if (j.contains("placement")) cfg.placement = j.at("placement").get<bool>();
  integer("rounds", cfg.rounds);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

GeneratorConfig load_config(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config file: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config file: ") + e.what());
  }
}

GeneratorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return load_config(in);
}

}  // namespace mcap
