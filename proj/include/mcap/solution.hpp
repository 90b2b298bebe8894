#pragma once

#include <cstdint>
#include <string>

#include "mcap/model.hpp"

// Common result record returned by every method runner (relaxation
// pipeline, equilibrium refinement, exhaustive search, random mapping).

namespace mcap {

struct SolutionMeta {
  std::string method;      // "mcap", "mcap-ne", "oracle", "random", ...
  std::uint64_t seed = 0;
  int trials = 0;          // rounding trials or enumerated profiles

  // Certified lower bound on the exact optimum carried out of the lifted
  // relaxation (zero when the method has none). Valid whenever
  // sdp_bound_valid; the achieved objective can never fall below it.
  double sdp_objective = 0;
  bool sdp_bound_valid = false;
  std::string sdp_status;
  int sdp_iterations = 0;
  bool used_fallback = false;

  // Filled by equilibrium refinement: objective at the starting profile
  // and accepted improvement steps.
  double start_objective = 0;
  int fip_iterations = 0;
};

struct Solution {
  StrategyProfile profile;
  Allocation allocation;
  CostBreakdown costs;
  SolutionMeta meta;
};

}  // namespace mcap
