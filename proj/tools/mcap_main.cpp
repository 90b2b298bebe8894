// Command-line front end: scenario generation, one-shot solves, parameter
// sweeps, and the paired placement comparison.
//
// Exit codes: 0 success, 2 enumeration-budget refusal, 3 solver failure
// (lifted solve failed with the fallback disabled, or an improvement path
// hit its iteration cap). Everything else (bad flags, unreadable files,
// invalid configs) exits 1 via the usual error paths.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcap/alloc.hpp"
#include "mcap/game.hpp"
#include "mcap/generate.hpp"
#include "mcap/oracle.hpp"
#include "mcap/relax.hpp"
#include "mcap/scenario_io.hpp"
#include "mcap/sdp.hpp"
#include "mcap/sweep.hpp"

namespace fs = std::filesystem;

namespace {

// Generator fields exposed as flags on every subcommand; flag > config file
// > built-in default.
struct CfgFlags {
  std::string config_path;
  int users = 0;
  int caps = 0;
  double alpha = 0;
  double beta = 0;
  double local_energy = 0;
  std::uint64_t seed = 1;
  bool placement = false;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_users = nullptr;
  CLI::Option* o_caps = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_local = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_placement = nullptr;

  void attach(CLI::App& cmd, bool with_placement) {
    o_config = cmd.add_option("--config", config_path,
                              "generator config JSON; flags override it")
                   ->check(CLI::ExistingFile);
    o_users = cmd.add_option("--users", users, "number of users");
    o_caps = cmd.add_option("--caps", caps, "number of CAPs");
    o_alpha = cmd.add_option("--alpha", alpha, "energy weight, s/J");
    o_beta = cmd.add_option("--beta", beta, "cloud-utility weight, J/bit");
    o_local = cmd.add_option(
        "--local-energy-per-bit", local_energy,
        "handset compute energy, J/bit (required unless in the config)");
    o_seed = cmd.add_option("--seed", seed, "base seed");
    if (with_placement)
      o_placement = cmd.add_flag("--placement", placement,
                                 "draw per-user placement constraints");
  }

  mcap::GeneratorConfig resolve() const {
    mcap::GeneratorConfig cfg;
    if (o_config->count()) cfg = mcap::load_config(config_path);
    if (o_users->count()) cfg.n_users = users;
    if (o_caps->count()) cfg.n_caps = caps;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_beta->count()) cfg.beta = beta;
    if (o_local->count()) cfg.local_energy_per_bit = local_energy;
    if (o_seed->count()) cfg.seed = seed;
    if (o_placement && o_placement->count()) cfg.placement = true;
    return cfg;
  }
};

// Method tuning knobs shared by solve / sweep / placement.
struct KnobFlags {
  int trials = 10;
  double sdp_tol = 1e-7;
  int sdp_max_iter = 20000;
  double alloc_tol = 1e-6;
  double ne_eps = 1e-6;
  int max_iter = 0;
  std::uint64_t budget = 2'000'000;
  bool no_fallback = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--trials", trials, "randomized rounding trials")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--sdp-tol", sdp_tol, "lifted-solve tolerance");
    cmd.add_option("--sdp-max-iter", sdp_max_iter,
                   "lifted-solve iteration cap");
    cmd.add_option("--alloc-tol", alloc_tol,
                   "resource-allocation relative tolerance");
    cmd.add_option("--ne-eps", ne_eps,
                   "minimum cost improvement for an accepted deviation");
    cmd.add_option("--max-iter", max_iter,
                   "improvement-path cap, 0 = 10*N*(2M+1)");
    cmd.add_option("--budget", budget, "exhaustive enumeration budget");
    cmd.add_flag("--no-fallback", no_fallback,
                 "fail (exit 3) instead of falling back to a random "
                 "profile when the lifted solve fails");
  }

  mcap::MethodOptions to_options() const {
    mcap::MethodOptions o;
    o.mcap.trials = trials;
    o.mcap.sdp_tol = sdp_tol;
    o.mcap.sdp_max_iter = sdp_max_iter;
    o.mcap.fallback = !no_fallback;
    o.fip.eps = ne_eps;
    o.fip.max_iter = max_iter;
    o.alloc_tol = alloc_tol;
    o.oracle_budget = budget;
    return o;
  }
};

std::vector<mcap::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<mcap::Method> out;
  for (const std::string& n : names) {
    const auto m = mcap::parse_method(n);
    if (!m)
      throw std::invalid_argument(
          "unknown method \"" + n +
          "\" (expected mcap, mcap-ne, random, random-ne or oracle)");
    out.push_back(*m);
  }
  return out;
}

std::string scenario_file_name(int round, int rounds) {
  if (rounds == 1) return "scenario.json";
  std::ostringstream name;
  name << "scenario_" << std::setw(3) << std::setfill('0') << round << ".json";
  return name.str();
}

void write_solution_json(const std::string& path, const mcap::Solution& sol,
                         double wall_ms) {
  using ordered = nlohmann::ordered_json;
  ordered j;
  j["method"] = sol.meta.method;
  j["objective"] = sol.costs.objective;
  j["round_time_s"] = sol.costs.round_time;
  ordered profile = ordered::array();
  for (std::size_t i = 0; i < sol.profile.size(); ++i) {
    ordered u;
    u["user"] = i;
    u["site"] = sol.profile[i].site;
    u["cloud"] = sol.profile[i].cloud;
    u["strategy"] = mcap::to_string(sol.profile[i]);
    u["delay_s"] = sol.costs.delay[i];
    u["energy_joule"] = sol.costs.energy[i];
    profile.push_back(u);
  }
  j["profile"] = profile;
  const int n = sol.allocation.n, m = sol.allocation.m;
  ordered alloc;
  auto grid = [&](const std::vector<double>& v) {
    ordered rows = ordered::array();
    for (int i = 0; i < n; ++i) {
      ordered row = ordered::array();
      for (int k = 0; k < m; ++k)
        row.push_back(v[static_cast<std::size_t>(i) * m + k]);
      rows.push_back(row);
    }
    return rows;
  };
  alloc["uplink_hz"] = grid(sol.allocation.up);
  alloc["downlink_hz"] = grid(sol.allocation.down);
  alloc["cpu_cycles_per_s"] = grid(sol.allocation.f);
  j["allocation"] = alloc;
  ordered meta;
  meta["seed"] = sol.meta.seed;
  meta["trials"] = sol.meta.trials;
  if (sol.meta.sdp_bound_valid) meta["relaxation_bound"] = sol.meta.sdp_objective;
  if (!sol.meta.sdp_status.empty()) meta["sdp_status"] = sol.meta.sdp_status;
  if (sol.meta.sdp_iterations > 0) meta["sdp_iterations"] = sol.meta.sdp_iterations;
  meta["used_fallback"] = sol.meta.used_fallback;
  if (sol.meta.fip_iterations > 0 || sol.meta.method.find("-ne") != std::string::npos) {
    meta["start_objective"] = sol.meta.start_objective;
    meta["fip_iterations"] = sol.meta.fip_iterations;
  }
  meta["wall_ms"] = wall_ms;
  j["meta"] = meta;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void print_solution(const mcap::Solution& sol, const mcap::Scenario& scenario,
                    double wall_ms) {
  std::cout << std::setprecision(10);
  std::cout << "method " << sol.meta.method << '\n'
            << "users " << scenario.n_users() << " caps " << scenario.n_caps()
            << '\n'
            << "objective " << sol.costs.objective << '\n'
            << "round_time " << sol.costs.round_time << '\n';
  if (sol.meta.sdp_bound_valid)
    std::cout << "relaxation_bound " << sol.meta.sdp_objective << '\n';
  if (!sol.meta.sdp_status.empty())
    std::cout << "sdp_status " << sol.meta.sdp_status << '\n';
  if (sol.meta.used_fallback) std::cout << "fallback true\n";
  if (sol.meta.method == "mcap-ne" || sol.meta.method == "random-ne")
    std::cout << "start_objective " << sol.meta.start_objective << '\n'
              << "fip_iterations " << sol.meta.fip_iterations << '\n';
  if (sol.meta.trials > 0) std::cout << "trials " << sol.meta.trials << '\n';
  std::cout << "wall_ms " << wall_ms << '\n';
  for (std::size_t i = 0; i < sol.profile.size(); ++i)
    std::cout << "user " << i << ' ' << mcap::to_string(sol.profile[i])
              << " delay " << sol.costs.delay[i] << " energy "
              << sol.costs.energy[i] << '\n';
}

int run_gen(const CfgFlags& cfg_flags, int rounds, const std::string& out_dir) {
  const mcap::GeneratorConfig cfg = cfg_flags.resolve();
  fs::create_directories(out_dir);
  for (int r = 0; r < rounds; ++r) {
    const mcap::Scenario s = mcap::generate_scenario(cfg, r);
    const std::string path =
        (fs::path(out_dir) / scenario_file_name(r, rounds)).string();
    mcap::save_scenario(path, s);
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

struct SolveArgs {
  std::string scenario_path;
  CLI::Option* o_scenario = nullptr;
  int round = 0;
  std::string method = "mcap";
  std::string out_dir;
  std::string trace_path;
  std::string dump_qcqp_path;
  std::string dump_sdp_path;
};

int run_solve(const CfgFlags& cfg_flags, const KnobFlags& knobs,
              const SolveArgs& args) {
  mcap::Scenario scenario;
  std::uint64_t seed;
  if (args.o_scenario->count()) {
    scenario = mcap::load_scenario(args.scenario_path);
    seed = cfg_flags.seed;
  } else {
    const mcap::GeneratorConfig cfg = cfg_flags.resolve();
    scenario = mcap::generate_scenario(cfg, args.round);
    seed = mcap::hash_combine(cfg.seed,
                              static_cast<std::uint64_t>(args.round));
  }

  const auto method = mcap::parse_method(args.method);
  if (!method)
    throw std::invalid_argument(
        "unknown method \"" + args.method +
        "\" (expected mcap, mcap-ne, random, random-ne or oracle)");

  // Debug dumps reflect exactly what the solver consumes: assembly on the
  // rescaled copy (Mbit / MHz / Gcycle working units) with entry bounds
  // from the all-local objective ceiling.
  if (!args.dump_qcqp_path.empty() || !args.dump_sdp_path.empty()) {
    const mcap::Scenario scaled = mcap::scaled_units(scenario);
    const mcap::QcqpForm q = mcap::assemble_qcqp(scaled);
    if (!args.dump_qcqp_path.empty()) {
      std::ofstream out(args.dump_qcqp_path, std::ios::binary);
      if (!out)
        throw std::runtime_error("cannot write " + args.dump_qcqp_path);
      mcap::dump_qcqp(out, q);
      std::cout << "wrote " << args.dump_qcqp_path << '\n';
    }
    if (!args.dump_sdp_path.empty()) {
      const mcap::StrategyProfile all_local(scenario.n_users(),
                                            mcap::Strategy::local());
      const double ceiling =
          mcap::optimize_allocation(all_local, scenario, knobs.alloc_tol)
              .costs.objective;
      mcap::SdpForm form = mcap::lift_to_sdp(q);
      mcap::apply_certificate_bounds(form, scaled, ceiling);
      std::ofstream out(args.dump_sdp_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + args.dump_sdp_path);
      mcap::dump_sdp(out, form);
      std::cout << "wrote " << args.dump_sdp_path << '\n';
    }
  }

  mcap::FipTrace trace;
  const auto t0 = std::chrono::steady_clock::now();
  const mcap::Solution sol =
      mcap::run_method(*method, scenario, seed, knobs.to_options(), &trace);
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

  print_solution(sol, scenario, wall_ms);

  if (!args.trace_path.empty()) {
    std::ofstream out(args.trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + args.trace_path);
    out << mcap::format_trace(trace);
    std::cout << "wrote " << args.trace_path << '\n';
  }
  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    const std::string path =
        (fs::path(args.out_dir) / "solution.json").string();
    write_solution_json(path, sol, wall_ms);
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

void print_rows(const std::vector<mcap::ResultRow>& rows,
                const std::string& parameter) {
  std::cout << std::setprecision(10);
  for (const mcap::ResultRow& row : rows) {
    std::cout << parameter << ' ' << row.value << ' '
              << mcap::method_name(row.method) << " mean ";
    if (row.completed > 0)
      std::cout << row.mean_objective << " std " << row.std_objective;
    else
      std::cout << "- std -";
    std::cout << " rounds " << row.completed << '/' << row.rounds << '\n';
  }
}

int finish_sweep(const mcap::SweepOutput& res, const std::string& parameter) {
  print_rows(res.rows, parameter);
  std::cout << "wrote " << res.csv_path << '\n'
            << "wrote " << res.plot_path << '\n'
            << "wrote " << res.timing_path << '\n';
  int missing = 0;
  for (const mcap::ResultRow& row : res.rows)
    missing += row.rounds - row.completed;
  if (missing > 0)
    std::cerr << "warning: " << missing
              << " round(s) failed and were recorded as missing cells\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-user multi-CAP offloading toolkit: scenario generation, "
      "relaxation and equilibrium solvers, parameter sweeps."};
  app.require_subcommand(1);

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate scenario files");
  CfgFlags gen_cfg;
  gen_cfg.attach(*gen, true);
  int gen_rounds = 1;
  std::string gen_out = ".";
  gen->add_option("--rounds", gen_rounds, "number of scenario files")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output directory");

  // solve
  CLI::App* solve =
      app.add_subcommand("solve", "solve one scenario with one method");
  CfgFlags solve_cfg;
  solve_cfg.attach(*solve, true);
  KnobFlags solve_knobs;
  solve_knobs.attach(*solve);
  SolveArgs solve_args;
  solve_args.o_scenario =
      solve
          ->add_option("--scenario", solve_args.scenario_path,
                       "scenario JSON to load; omitted = generate from the "
                       "config flags")
          ->check(CLI::ExistingFile);
  solve->add_option("--round", solve_args.round,
                    "generation round index when generating");
  solve
      ->add_option("--method", solve_args.method,
                   "mcap | mcap-ne | oracle | random | random-ne")
      ->required();
  solve->add_option("--out", solve_args.out_dir,
                    "directory for solution.json");
  solve->add_option("--trace", solve_args.trace_path,
                    "write the improvement path of an NE method here");
  solve->add_option("--dump-qcqp", solve_args.dump_qcqp_path,
                    "write the quadratic system as a sparse text dump");
  solve->add_option("--dump-sdp", solve_args.dump_sdp_path,
                    "write the lifted system as a sparse text dump");

  // sweep
  CLI::App* sweep =
      app.add_subcommand("sweep", "sweep one parameter over a value list");
  CfgFlags sweep_cfg;
  sweep_cfg.attach(*sweep, true);
  KnobFlags sweep_knobs;
  sweep_knobs.attach(*sweep);
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_methods = {"mcap", "mcap-ne", "random",
                                            "random-ne"};
  int sweep_rounds = 0;
  int sweep_threads = 0;
  std::string sweep_out = ".";
  sweep
      ->add_option("--parameter", sweep_parameter,
                   "n_caps | n_users | alpha | beta | placement")
      ->required();
  sweep->add_option("--values", sweep_values, "sweep values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--methods", sweep_methods, "methods to run")
      ->delimiter(',');
  sweep->add_option("--rounds", sweep_rounds,
                    "rounds per value (0 = config rounds)");
  sweep->add_option("--threads", sweep_threads,
                    "worker threads (0 = hardware)");
  sweep->add_option("--out", sweep_out, "output directory");

  // placement
  CLI::App* placement = app.add_subcommand(
      "placement",
      "paired comparison with and without placement constraints");
  CfgFlags placement_cfg;
  placement_cfg.attach(*placement, false);
  KnobFlags placement_knobs;
  placement_knobs.attach(*placement);
  std::vector<std::string> placement_methods = {"mcap-ne"};
  int placement_rounds = 0;
  int placement_threads = 0;
  std::string placement_out = ".";
  placement->add_option("--methods", placement_methods, "methods to run")
      ->delimiter(',');
  placement->add_option("--rounds", placement_rounds,
                        "rounds (0 = config rounds)");
  placement->add_option("--threads", placement_threads,
                        "worker threads (0 = hardware)");
  placement->add_option("--out", placement_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return run_gen(gen_cfg, gen_rounds, gen_out);

    if (solve->parsed()) return run_solve(solve_cfg, solve_knobs, solve_args);

    if (sweep->parsed()) {
      const mcap::GeneratorConfig cfg = sweep_cfg.resolve();
      mcap::SweepSpec spec;
      spec.parameter = sweep_parameter;
      spec.values = sweep_values;
      spec.methods = parse_methods(sweep_methods);
      spec.rounds = sweep_rounds > 0 ? sweep_rounds : cfg.rounds;
      spec.seed = cfg.seed;
      const mcap::SweepOutput res =
          mcap::run_sweep(spec, cfg, sweep_out, sweep_knobs.to_options(),
                          sweep_threads);
      return finish_sweep(res, spec.parameter);
    }

    if (placement->parsed()) {
      mcap::GeneratorConfig cfg = placement_cfg.resolve();
      // The placement experiment convention is 12 users unless overridden.
      if (!placement_cfg.o_users->count() && !placement_cfg.o_config->count())
        cfg.n_users = 12;
      const int rounds = placement_rounds > 0 ? placement_rounds : cfg.rounds;
      const mcap::SweepOutput res = mcap::compare_placement(
          cfg, parse_methods(placement_methods), rounds, cfg.seed,
          placement_out, placement_knobs.to_options(), placement_threads);
      finish_sweep(res, "placement");
      // Paired summary: rows come out as (value 0, value 1) per method.
      const std::size_t n_methods = placement_methods.size();
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const mcap::ResultRow& off = res.rows[mi];
        const mcap::ResultRow& on = res.rows[n_methods + mi];
        if (off.completed > 0 && on.completed > 0)
          std::cout << "paired " << mcap::method_name(off.method)
                    << " unconstrained " << off.mean_objective
                    << " constrained " << on.mean_objective << " delta "
                    << on.mean_objective - off.mean_objective << '\n';
      }
      return 0;
    }
  } catch (const mcap::BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const mcap::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
