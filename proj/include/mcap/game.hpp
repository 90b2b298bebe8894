#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcap/relax.hpp"
#include "mcap/solution.hpp"

// Strategic view of the offloading problem: per-user strategy sets, the
// exact potential (equal to the system objective), best-response dynamics,
// and equilibrium verification. Every candidate profile is costed with its
// own optimal resource allocation.

namespace mcap {

struct FipOptions {
  // Minimum absolute individual-cost improvement for a deviation to count.
  // Keep at least 10x the allocation tolerance, otherwise solver noise can
  // masquerade as improvement and the path may cycle.
  double eps = 1e-6;
  int max_iter = 0;  // accepted deviations; 0 means 10 * N * (2M + 1)
  double alloc_tol = 1e-6;
};

struct FipStep {
  int user = -1;
  Strategy from, to;
  double potential_before = 0, potential_after = 0;
};

struct FipTrace {
  std::vector<FipStep> steps;
  std::string start;  // "mcap" | "random" | "given" | ...
  bool converged = false;
  int iterations() const { return static_cast<int>(steps.size()); }
};

// Deterministic candidate order: Local, then CAP-processed by ascending
// CAP, then cloud-forwarded by ascending CAP; forbidden CAPs excluded.
// Size is 1 + 2 * (M - |forbidden|).
std::vector<Strategy> strategy_set(int user, const Scenario& scenario);

// The exact potential of the game: identical to the system objective.
double potential(const StrategyProfile& profile, const Allocation& alloc,
                 const Scenario& scenario);

// Minimizes user i's individual cost over strategy_set(i) holding everyone
// else fixed; each candidate is evaluated under its own optimal allocation.
// Returns the minimizer when it improves the current cost by more than eps
// (ties broken by candidate order), otherwise nothing.
std::optional<Strategy> best_response(int user, const StrategyProfile& profile,
                                      const Scenario& scenario, double eps,
                                      double alloc_tol = 1e-6);

// Best-response improvement path: scan users in index order, apply the
// first improving best response, restart the scan; stop when nobody
// improves. The result then passes verify_ne at the same eps. A trace with
// converged = false means max_iter was exhausted (eps too small relative
// to the allocation tolerance).
std::pair<Solution, FipTrace> fip(const StrategyProfile& start,
                                  const Scenario& scenario,
                                  const FipOptions& opts = {},
                                  const std::string& start_tag = "given");

struct NeCheck {
  bool is_ne = false;
  int worst_user = -1;          // user with the largest available gain
  Strategy worst_deviation;     // their best deviation
  double best_improvement = 0;  // positive means a profitable deviation
};

// Exhaustive unilateral-deviation check at threshold eps.
NeCheck verify_ne(const StrategyProfile& profile, const Scenario& scenario,
                  double eps, double alloc_tol = 1e-6);

// Relaxation pipeline followed by the improvement path from its profile.
// Solution meta keeps the relaxation bound, the starting objective, and the
// accepted deviation count.
std::pair<Solution, FipTrace> mcap_ne(const Scenario& scenario,
                                      const McapOptions& mcap_opts = {},
                                      const FipOptions& fip_opts = {});

// One line per accepted deviation: step index, user, old and new strategy,
// potential before and after.
std::string format_trace(const FipTrace& trace);

}  // namespace mcap
