#pragma once

#include <cstdint>
#include <stdexcept>

#include "mcap/game.hpp"
#include "mcap/rng.hpp"
#include "mcap/solution.hpp"

// Ground-truth baselines: exhaustive search over the joint strategy space
// and the uniform random-mapping heuristic.

namespace mcap {

// Raised instead of silently truncating when the joint strategy space is
// larger than the enumeration budget.
struct BudgetExceeded : std::runtime_error {
  BudgetExceeded(unsigned long long count_, unsigned long long budget_);
  unsigned long long count;
  unsigned long long budget;
};

// Enumerates every valid profile with a mixed-radix counter over the
// per-user strategy sets (user 0 fastest digit) and returns the global
// minimum objective under exact allocation; ties go to the earliest
// profile in enumeration order. meta.trials records the profile count.
Solution exhaustive(const Scenario& scenario, double alloc_tol = 1e-6,
                    std::uint64_t budget = 2'000'000);

// Number of profiles exhaustive would enumerate (saturates at 2^64 - 1).
unsigned long long profile_count(const Scenario& scenario);

// One uniform draw from each user's strategy set; always valid.
StrategyProfile random_profile(const Scenario& scenario, Rng& rng);

}  // namespace mcap
