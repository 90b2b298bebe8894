#include "mcap/game.hpp"

#include <sstream>

#include "mcap/alloc.hpp"

namespace mcap {

std::vector<Strategy> strategy_set(int user, const Scenario& scenario) {
  const Task& t = scenario.tasks[user];
  std::vector<Strategy> out;
  out.push_back(Strategy::local());
  for (int j = 1; j <= scenario.n_caps(); ++j)
    if (!t.is_forbidden(j)) out.push_back(Strategy::cap(j, false));
  for (int j = 1; j <= scenario.n_caps(); ++j)
    if (!t.is_forbidden(j)) out.push_back(Strategy::cap(j, true));
  return out;
}

double potential(const StrategyProfile& profile, const Allocation& alloc,
                 const Scenario& scenario) {
  return evaluate(profile, alloc, scenario).objective;
}

namespace {

double cost_of(int user, const StrategyProfile& profile,
               const Scenario& scenario, double alloc_tol) {
  const AllocResult r = optimize_allocation(profile, scenario, alloc_tol);
  return individual_cost(user, profile, r.allocation, scenario);
}

}  // namespace

std::optional<Strategy> best_response(int user, const StrategyProfile& profile,
                                      const Scenario& scenario, double eps,
                                      double alloc_tol) {
  const double current = cost_of(user, profile, scenario, alloc_tol);
  StrategyProfile trial = profile;
  std::optional<Strategy> best;
  double best_cost = current;
  for (const Strategy& cand : strategy_set(user, scenario)) {
    if (cand == profile[user]) continue;
    trial[user] = cand;
    const double c = cost_of(user, trial, scenario, alloc_tol);
    if (c < best_cost) {
      best_cost = c;
      best = cand;
    }
  }
  if (best && current - best_cost > eps) return best;
  return std::nullopt;
}

std::pair<Solution, FipTrace> fip(const StrategyProfile& start,
                                  const Scenario& scenario,
                                  const FipOptions& opts,
                                  const std::string& start_tag) {
  const int n = scenario.n_users();
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter
                        : 10 * n * (2 * scenario.n_caps() + 1);

  StrategyProfile profile = start;
  AllocResult res = optimize_allocation(profile, scenario, opts.alloc_tol);

  FipTrace trace;
  trace.start = start_tag;
  Solution sol;
  sol.meta.method = "fip";
  sol.meta.start_objective = res.costs.objective;

  bool progress = true;
  while (progress) {
    progress = false;
    for (int i = 0; i < n; ++i) {
      const std::optional<Strategy> move =
          best_response(i, profile, scenario, opts.eps, opts.alloc_tol);
      if (!move) continue;
      FipStep step;
      step.user = i;
      step.from = profile[i];
      step.to = *move;
      step.potential_before = res.costs.objective;
      profile[i] = *move;
      res = optimize_allocation(profile, scenario, opts.alloc_tol);
      step.potential_after = res.costs.objective;
      trace.steps.push_back(step);
      progress = true;
      break;  // accepted deviation: restart the scan at user 0
    }
    if (static_cast<int>(trace.steps.size()) > max_iter) {
      trace.converged = false;
      sol.profile = profile;
      sol.allocation = res.allocation;
      sol.costs = res.costs;
      sol.meta.fip_iterations = trace.iterations();
      return {sol, trace};
    }
  }
  trace.converged = true;
  sol.profile = profile;
  sol.allocation = res.allocation;
  sol.costs = res.costs;
  sol.meta.fip_iterations = trace.iterations();
  return {sol, trace};
}

NeCheck verify_ne(const StrategyProfile& profile, const Scenario& scenario,
                  double eps, double alloc_tol) {
  NeCheck out;
  for (int i = 0; i < scenario.n_users(); ++i) {
    const double current = cost_of(i, profile, scenario, alloc_tol);
    StrategyProfile trial = profile;
    for (const Strategy& cand : strategy_set(i, scenario)) {
      if (cand == profile[i]) continue;
      trial[i] = cand;
      const double gain = current - cost_of(i, trial, scenario, alloc_tol);
      if (gain > out.best_improvement) {
        out.best_improvement = gain;
        out.worst_user = i;
        out.worst_deviation = cand;
      }
    }
  }
  out.is_ne = out.best_improvement <= eps;
  return out;
}

std::pair<Solution, FipTrace> mcap_ne(const Scenario& scenario,
                                      const McapOptions& mcap_opts,
                                      const FipOptions& fip_opts) {
  const Solution start = mcap(scenario, mcap_opts);
  auto [sol, trace] = fip(start.profile, scenario, fip_opts, "mcap");
  sol.meta = start.meta;
  sol.meta.method = "mcap-ne";
  sol.meta.start_objective = start.costs.objective;
  sol.meta.fip_iterations = trace.iterations();
  return {std::move(sol), std::move(trace)};
}

std::string format_trace(const FipTrace& trace) {
  std::ostringstream out;
  out.precision(12);
  out << "# improvement path, start " << trace.start << ", "
      << trace.iterations() << " steps, "
      << (trace.converged ? "converged" : "iteration limit") << "\n";
  out << "# step user from to potential_before potential_after\n";
  int k = 0;
  for (const FipStep& s : trace.steps) {
    out << k++ << " " << s.user << " " << to_string(s.from) << " "
        << to_string(s.to) << " " << s.potential_before << " "
        << s.potential_after << "\n";
  }
  return out.str();
}

}  // namespace mcap
