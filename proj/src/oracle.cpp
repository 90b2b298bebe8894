#include "mcap/oracle.hpp"

#include <limits>
#include <string>

#include "mcap/alloc.hpp"

namespace mcap {

namespace {

constexpr unsigned long long kCountMax =
    std::numeric_limits<unsigned long long>::max();

}  // namespace

BudgetExceeded::BudgetExceeded(unsigned long long count_,
                               unsigned long long budget_)
    : std::runtime_error("exhaustive search refused: " +
                         std::to_string(count_) + " profiles exceed budget " +
                         std::to_string(budget_)),
      count(count_),
      budget(budget_) {}

unsigned long long profile_count(const Scenario& scenario) {
  unsigned long long count = 1;
  for (int i = 0; i < scenario.n_users(); ++i) {
    const unsigned long long k = strategy_set(i, scenario).size();
    if (count > kCountMax / k) return kCountMax;
    count *= k;
  }
  return count;
}

Solution exhaustive(const Scenario& scenario, double alloc_tol,
                    std::uint64_t budget) {
  const int n = scenario.n_users();
  std::vector<std::vector<Strategy>> options(n);
  for (int i = 0; i < n; ++i) options[i] = strategy_set(i, scenario);

  const unsigned long long count = profile_count(scenario);
  if (count > budget) throw BudgetExceeded(count, budget);

  StrategyProfile profile(n, Strategy::local());
  std::vector<std::size_t> digit(n, 0);
  Solution best;
  best.meta.method = "oracle";
  best.meta.trials = static_cast<int>(count);
  double best_obj = std::numeric_limits<double>::infinity();
  while (true) {
    for (int i = 0; i < n; ++i) profile[i] = options[i][digit[i]];
    const AllocResult r = optimize_allocation(profile, scenario, alloc_tol);
    if (r.costs.objective < best_obj) {
      best_obj = r.costs.objective;
      best.profile = profile;
      best.allocation = r.allocation;
      best.costs = r.costs;
    }
    int i = 0;
    while (i < n && ++digit[i] == options[i].size()) digit[i++] = 0;
    if (i == n) break;
  }
  return best;
}

StrategyProfile random_profile(const Scenario& scenario, Rng& rng) {
  StrategyProfile out;
  out.reserve(scenario.n_users());
  for (int i = 0; i < scenario.n_users(); ++i) {
    const std::vector<Strategy> options = strategy_set(i, scenario);
    out.push_back(options[rng.index(options.size())]);
  }
  return out;
}

}  // namespace mcap
