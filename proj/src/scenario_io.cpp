#include "mcap/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace mcap {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

ordered task_to_json(const Task& t) {
  ordered j;
  j["d_in_bits"] = t.d_in;
  j["d_out_bits"] = t.d_out;
  j["cycles"] = t.cycles;
  j["alpha_s_per_joule"] = t.alpha;
  j["beta_joule_per_unit"] = t.beta;
  j["cloud_utility_units"] = t.cloud_utility;
  j["eta_up_bits_per_s_per_hz"] = t.eta_up;
  j["eta_down_bits_per_s_per_hz"] = t.eta_down;
  j["forbidden_caps"] = t.forbidden;
  j["local_time_s_per_bit"] = t.local_time_per_bit;
  j["local_energy_joule_per_bit"] = t.local_energy_per_bit;
  j["tx_energy_joule_per_bit"] = t.tx_energy_per_bit;
  j["rx_energy_joule_per_bit"] = t.rx_energy_per_bit;
  return j;
}

Task task_from_json(const json& j) {
  Task t;
  t.d_in = j.at("d_in_bits").get<double>();
  t.d_out = j.at("d_out_bits").get<double>();
  t.cycles = j.at("cycles").get<double>();
  t.alpha = j.at("alpha_s_per_joule").get<double>();
  t.beta = j.at("beta_joule_per_unit").get<double>();
  t.cloud_utility = j.at("cloud_utility_units").get<double>();
  t.eta_up = j.at("eta_up_bits_per_s_per_hz").get<std::vector<double>>();
  t.eta_down = j.at("eta_down_bits_per_s_per_hz").get<std::vector<double>>();
  t.forbidden = j.at("forbidden_caps").get<std::vector<int>>();
  t.local_time_per_bit = j.at("local_time_s_per_bit").get<double>();
  t.local_energy_per_bit = j.at("local_energy_joule_per_bit").get<double>();
  t.tx_energy_per_bit = j.at("tx_energy_joule_per_bit").get<double>();
  t.rx_energy_per_bit = j.at("rx_energy_joule_per_bit").get<double>();
  return t;
}

}  // namespace

void save_scenario(std::ostream& out, const Scenario& scenario) {
  ordered root;
  root["format"] = "mcap-scenario-v1";
  ordered cloud;
  cloud["f_c_cycles_per_s"] = scenario.cloud.f_c;
  cloud["r_ac_bits_per_s"] = scenario.cloud.r_ac;
  root["cloud"] = cloud;
  root["caps"] = ordered::array();
  for (const CapSpec& c : scenario.caps) {
    ordered jc;
    jc["c_ul_hz"] = c.c_ul;
    jc["c_dl_hz"] = c.c_dl;
    jc["c_total_hz"] = c.c_total;
    jc["f_a_cycles_per_s"] = c.f_a;
    root["caps"].push_back(jc);
  }
  root["tasks"] = ordered::array();
  for (const Task& t : scenario.tasks) root["tasks"].push_back(task_to_json(t));
  out << root.dump(2) << '\n';
}

void save_scenario(const std::string& path, const Scenario& scenario) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_scenario(out, scenario);
}

Scenario load_scenario(std::istream& in) {
  json root = json::parse(in);
  if (root.value("format", "") != std::string("mcap-scenario-v1"))
    throw std::runtime_error("not a mcap-scenario-v1 file");
  Scenario s;
  s.cloud.f_c = root.at("cloud").at("f_c_cycles_per_s").get<double>();
  s.cloud.r_ac = root.at("cloud").at("r_ac_bits_per_s").get<double>();
  for (const json& jc : root.at("caps")) {
    CapSpec c;
    c.c_ul = jc.at("c_ul_hz").get<double>();
    c.c_dl = jc.at("c_dl_hz").get<double>();
    c.c_total = jc.at("c_total_hz").get<double>();
    c.f_a = jc.at("f_a_cycles_per_s").get<double>();
    s.caps.push_back(c);
  }
  for (const json& jt : root.at("tasks")) s.tasks.push_back(task_from_json(jt));
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_scenario(in);
}

}  // namespace mcap
