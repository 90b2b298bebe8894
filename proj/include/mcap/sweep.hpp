#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcap/game.hpp"
#include "mcap/generate.hpp"
#include "mcap/oracle.hpp"
#include "mcap/relax.hpp"
#include "mcap/solution.hpp"

// Experiment harness: run solution methods over generated rounds while one
// parameter sweeps a value list, and emit deterministic CSV plus a
// plotting-friendly table. Round r of every cell uses the scenario seed
// hash(base seed, r), so cells in the same column are paired across sweep
// values and methods.

namespace mcap {

enum class Method { kMcap, kMcapNe, kRandom, kRandomNe, kOracle };

// Canonical names as used in CSV and CLI: "mcap", "mcap-ne", "random",
// "random-ne", "oracle".
std::string method_name(Method m);

// Accepts canonical names plus "_" for "-". Returns nothing on unknown.
std::optional<Method> parse_method(std::string_view name);

// Shared knobs for every runner. The per-round seed and alloc_tol override
// their counterparts inside the nested option structs, so there is exactly
// one allocation tolerance per sweep.
struct MethodOptions {
  McapOptions mcap;
  FipOptions fip;
  double alloc_tol = 1e-6;
  std::uint64_t oracle_budget = 2'000'000;
};

// Runs one method on one scenario. Random mapping and the improvement path
// from it share the seed, so "random-ne" refines exactly the profile that
// "random" reports. NE methods copy their improvement path into *trace
// when given. Throws BudgetExceeded (oracle too large) or SolverFailure
// (lifted solve failed with fallback off, or an improvement path hit its
// iteration cap).
Solution run_method(Method m, const Scenario& scenario, std::uint64_t seed,
                    const MethodOptions& opts = {}, FipTrace* trace = nullptr);

struct SweepSpec {
  // One of: n_caps, n_users, alpha, beta, placement. A placement sweep
  // treats value 0 as unconstrained and nonzero as constrained; other
  // parameters substitute the value into the generator config.
  std::string parameter;
  std::vector<double> values;
  std::vector<Method> methods;
  int rounds = 50;
  std::uint64_t seed = 1;
};

struct ResultRow {
  double value = 0;
  Method method = Method::kMcap;
  int rounds = 0;     // requested
  int completed = 0;  // rounds that produced a result
  double mean_objective = 0;       // over completed rounds
  double std_objective = 0;        // sample std, 0 when completed < 2
  double mean_fip_iterations = 0;  // NaN for methods without a path
  double mean_wall_ms = 0;         // informational only
};

struct SweepOutput {
  std::vector<ResultRow> rows;  // ordered by (value index, method index)
  std::string csv_path;         // results.csv
  std::string plot_path;        // plotdata_<parameter>.txt
  std::string timing_path;      // timings.txt
};

// Generates cfg-with-value scenarios for every (value, round), runs every
// method, and writes three files into out_dir (created if missing):
//
//   results.csv   versioned header, one row per (value, method); byte
//                 identical across reruns of the same spec and config
//   plotdata_<parameter>.txt  x column plus one mean-objective column per
//                 method, gnuplot/pyplot friendly, missing cells as nan
//   timings.txt   wall-clock means; informational, excluded from the
//                 determinism guarantee
//
// Per-round method failures leave missing cells and the sweep continues.
// If the methods include the oracle, every sweep value must pass the
// enumeration budget up front (worst case (2M+1)^N profiles), otherwise
// BudgetExceeded is thrown before any work starts. Rounds run on
// `threads` workers (0 = hardware concurrency); output is independent of
// the schedule.
SweepOutput run_sweep(const SweepSpec& spec, const GeneratorConfig& cfg,
                      const std::string& out_dir,
                      const MethodOptions& opts = {}, int threads = 0);

// Paired placement comparison: a placement sweep over {0, 1} on the same
// seeds. Convention for the experiment is 12 users; pass cfg.n_users
// accordingly. Returns the rows (and writes files) exactly like run_sweep.
SweepOutput compare_placement(const GeneratorConfig& cfg,
                              const std::vector<Method>& methods, int rounds,
                              std::uint64_t seed, const std::string& out_dir,
                              const MethodOptions& opts = {}, int threads = 0);

}  // namespace mcap
