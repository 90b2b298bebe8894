#include "mcap/sweep.hpp"

#include "mcap/alloc.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <climits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

namespace mcap {

namespace {

// Shortest round-trip decimal form; deterministic across platforms, unlike
// iostream formatting with locale or precision defaults.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_cell(double v) { return std::isnan(v) ? std::string() : fmt(v); }

double nan_v() { return std::numeric_limits<double>::quiet_NaN(); }

GeneratorConfig apply_parameter(GeneratorConfig cfg, const std::string& p,
                                double v) {
  auto as_count = [&](const char* what) {
    if (v < 1 || std::floor(v) != v)
      throw std::invalid_argument(std::string("sweep: ") + what +
                                  " values must be positive integers");
    return static_cast<int>(v);
  };
  if (p == "n_caps")
    cfg.n_caps = as_count("n_caps");
  else if (p == "n_users")
    cfg.n_users = as_count("n_users");
  else if (p == "alpha")
    cfg.alpha = v;
  else if (p == "beta")
    cfg.beta = v;
  else if (p == "placement")
    cfg.placement = v != 0;
  else
    throw std::invalid_argument("sweep: unknown parameter \"" + p +
                                "\" (expected n_caps, n_users, alpha, beta "
                                "or placement)");
  return cfg;
}

// Worst-case joint profile count (2M+1)^N, saturating.
unsigned long long worst_profiles(int n_users, int n_caps) {
  const unsigned long long per = 2ull * n_caps + 1;
  unsigned long long c = 1;
  for (int i = 0; i < n_users; ++i) {
    if (c > ULLONG_MAX / per) return ULLONG_MAX;
    c *= per;
  }
  return c;
}

struct Cell {
  bool ok = false;
  double objective = 0;
  double fip_iterations = 0;
  bool has_fip = false;
  double wall_ms = 0;
};

bool is_ne_method(Method m) {
  return m == Method::kMcapNe || m == Method::kRandomNe;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kMcap: return "mcap";
    case Method::kMcapNe: return "mcap-ne";
    case Method::kRandom: return "random";
    case Method::kRandomNe: return "random-ne";
    case Method::kOracle: return "oracle";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string s(name);
  for (char& c : s)
    if (c == '_') c = '-';
  if (s == "mcap") return Method::kMcap;
  if (s == "mcap-ne") return Method::kMcapNe;
  if (s == "random") return Method::kRandom;
  if (s == "random-ne") return Method::kRandomNe;
  if (s == "oracle") return Method::kOracle;
  return std::nullopt;
}

Solution run_method(Method m, const Scenario& scenario, std::uint64_t seed,
                    const MethodOptions& opts, FipTrace* trace_out) {
  McapOptions mo = opts.mcap;
  mo.seed = seed;
  mo.alloc_tol = opts.alloc_tol;
  FipOptions fo = opts.fip;
  fo.alloc_tol = opts.alloc_tol;

  switch (m) {
    case Method::kMcap:
      return mcap(scenario, mo);
    case Method::kMcapNe: {
      auto [sol, trace] = mcap_ne(scenario, mo, fo);
      if (trace_out) *trace_out = trace;
      if (!trace.converged)
        throw SolverFailure("equilibrium refinement hit the iteration cap");
      return sol;
    }
    case Method::kRandom: {
      Rng rng(seed);
      const StrategyProfile p = random_profile(scenario, rng);
      AllocResult r = optimize_allocation(p, scenario, opts.alloc_tol);
      Solution sol{p, std::move(r.allocation), std::move(r.costs), {}};
      sol.meta.method = "random";
      sol.meta.seed = seed;
      sol.meta.trials = 1;
      return sol;
    }
    case Method::kRandomNe: {
      Rng rng(seed);
      const StrategyProfile p = random_profile(scenario, rng);
      auto [sol, trace] = fip(p, scenario, fo, "random");
      if (trace_out) *trace_out = trace;
      if (!trace.converged)
        throw SolverFailure("equilibrium refinement hit the iteration cap");
      sol.meta.method = "random-ne";
      sol.meta.seed = seed;
      return sol;
    }
    case Method::kOracle:
      return exhaustive(scenario, opts.alloc_tol, opts.oracle_budget);
  }
  throw std::logic_error("run_method: unhandled method");
}

SweepOutput run_sweep(const SweepSpec& spec, const GeneratorConfig& cfg,
                      const std::string& out_dir, const MethodOptions& opts,
                      int threads) {
  if (spec.values.empty())
    throw std::invalid_argument("sweep: empty value list");
  if (spec.methods.empty())
    throw std::invalid_argument("sweep: empty method list");
  if (spec.rounds < 1) throw std::invalid_argument("sweep: rounds < 1");

  // Resolve configs up front; this also validates the parameter name and
  // every value before any work starts.
  std::vector<GeneratorConfig> configs;
  for (double v : spec.values) {
    GeneratorConfig c = apply_parameter(cfg, spec.parameter, v);
    c.seed = spec.seed;
    c.validate();
    configs.push_back(c);
  }

  // Oracle runs only when every sweep value clears the enumeration budget.
  const bool wants_oracle =
      std::find(spec.methods.begin(), spec.methods.end(), Method::kOracle) !=
      spec.methods.end();
  if (wants_oracle)
    for (const GeneratorConfig& c : configs) {
      const unsigned long long worst = worst_profiles(c.n_users, c.n_caps);
      if (worst > opts.oracle_budget)
        throw BudgetExceeded(worst, opts.oracle_budget);
    }

  const int n_values = static_cast<int>(spec.values.size());
  const int n_methods = static_cast<int>(spec.methods.size());
  std::vector<Cell> cells(static_cast<std::size_t>(n_values) * spec.rounds *
                          n_methods);
  auto cell_at = [&](int vi, int round, int mi) -> Cell& {
    return cells[(static_cast<std::size_t>(vi) * spec.rounds + round) *
                     n_methods +
                 mi];
  };

  // One job per (value, round): generate the scenario once and run every
  // method on it. Failures leave the cell marked missing.
  std::atomic<int> next{0};
  const int n_jobs = n_values * spec.rounds;
  auto work = [&]() {
    for (int job = next.fetch_add(1); job < n_jobs;
         job = next.fetch_add(1)) {
      const int vi = job / spec.rounds;
      const int round = job % spec.rounds;
      const std::uint64_t round_seed =
          hash_combine(spec.seed, static_cast<std::uint64_t>(round));
      Scenario scenario;
      bool have_scenario = false;
      try {
        scenario = generate_scenario(configs[vi], round);
        have_scenario = true;
      } catch (const std::exception&) {
        // leaves the whole round missing
      }
      for (int mi = 0; mi < n_methods; ++mi) {
        Cell& cell = cell_at(vi, round, mi);
        if (!have_scenario) continue;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const Solution sol =
              run_method(spec.methods[mi], scenario, round_seed, opts);
          cell.ok = true;
          cell.objective = sol.costs.objective;
          if (is_ne_method(spec.methods[mi])) {
            cell.has_fip = true;
            cell.fip_iterations = sol.meta.fip_iterations;
          }
        } catch (const std::exception&) {
          cell.ok = false;
        }
        cell.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      }
    }
  };

  int n_workers = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min(n_workers, n_jobs));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // Aggregate in deterministic (value, method) order.
  SweepOutput out;
  for (int vi = 0; vi < n_values; ++vi)
    for (int mi = 0; mi < n_methods; ++mi) {
      ResultRow row;
      row.value = spec.values[vi];
      row.method = spec.methods[mi];
      row.rounds = spec.rounds;
      double sum = 0, sum_fip = 0, sum_ms = 0;
      for (int r = 0; r < spec.rounds; ++r) {
        const Cell& cell = cell_at(vi, r, mi);
        sum_ms += cell.wall_ms;
        if (!cell.ok) continue;
        ++row.completed;
        sum += cell.objective;
        sum_fip += cell.fip_iterations;
      }
      if (row.completed > 0) {
        row.mean_objective = sum / row.completed;
        double ss = 0;
        for (int r = 0; r < spec.rounds; ++r) {
          const Cell& cell = cell_at(vi, r, mi);
          if (!cell.ok) continue;
          const double d = cell.objective - row.mean_objective;
          ss += d * d;
        }
        row.std_objective =
            row.completed > 1 ? std::sqrt(ss / (row.completed - 1)) : 0.0;
        row.mean_fip_iterations = is_ne_method(row.method)
                                      ? sum_fip / row.completed
                                      : nan_v();
      } else {
        row.mean_objective = nan_v();
        row.std_objective = nan_v();
        row.mean_fip_iterations = nan_v();
      }
      row.mean_wall_ms = sum_ms / spec.rounds;
      out.rows.push_back(row);
    }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  out.csv_path = (fs::path(out_dir) / "results.csv").string();
  {
    std::ofstream csv(out.csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + out.csv_path);
    csv << "# results v1\n"
        << "parameter,value,method,rounds,completed,mean_objective,"
           "std_objective,mean_fip_iterations\n";
    for (const ResultRow& row : out.rows)
      csv << spec.parameter << ',' << fmt(row.value) << ','
          << method_name(row.method) << ',' << row.rounds << ','
          << row.completed << ',' << fmt_cell(row.mean_objective) << ','
          << fmt_cell(row.std_objective) << ','
          << fmt_cell(row.mean_fip_iterations) << '\n';
  }

  out.plot_path =
      (fs::path(out_dir) / ("plotdata_" + spec.parameter + ".txt")).string();
  {
    std::ofstream plot(out.plot_path, std::ios::binary);
    if (!plot) throw std::runtime_error("cannot write " + out.plot_path);
    plot << "# " << spec.parameter;
    for (Method m : spec.methods) plot << ' ' << method_name(m);
    plot << '\n';
    for (int vi = 0; vi < n_values; ++vi) {
      plot << fmt(spec.values[vi]);
      for (int mi = 0; mi < n_methods; ++mi) {
        const double v = out.rows[vi * n_methods + mi].mean_objective;
        plot << ' ' << (std::isnan(v) ? "nan" : fmt(v));
      }
      plot << '\n';
    }
  }

  out.timing_path = (fs::path(out_dir) / "timings.txt").string();
  {
    std::ofstream tim(out.timing_path, std::ios::binary);
    if (!tim) throw std::runtime_error("cannot write " + out.timing_path);
    tim << "# wall-clock means, ms; informational only and excluded from "
           "the byte-identical-output guarantee\n"
        << "parameter,value,method,mean_wall_ms\n";
    for (const ResultRow& row : out.rows)
      tim << spec.parameter << ',' << fmt(row.value) << ','
          << method_name(row.method) << ',' << fmt(row.mean_wall_ms) << '\n';
  }

  return out;
}

SweepOutput compare_placement(const GeneratorConfig& cfg,
                              const std::vector<Method>& methods, int rounds,
                              std::uint64_t seed, const std::string& out_dir,
                              const MethodOptions& opts, int threads) {
  SweepSpec spec;
  spec.parameter = "placement";
  spec.values = {0.0, 1.0};
  spec.methods = methods;
  spec.rounds = rounds;
  spec.seed = seed;
  return run_sweep(spec, cfg, out_dir, opts, threads);
}

}  // namespace mcap
