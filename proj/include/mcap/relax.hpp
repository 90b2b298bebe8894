#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "mcap/rng.hpp"
#include "mcap/sdp_solver.hpp"
#include "mcap/solution.hpp"

// Relaxation pipeline: assemble the quadratic system (qcqp.hpp), lift it
// (sdp.hpp), solve the lifted problem, read rounding marginals off the
// border row, draw randomized trials, and keep the best trial after exact
// resource allocation.

namespace mcap {

// Per-user site distribution over {Local, Cap 1..M} plus the conditional
// cloud-forwarding probability given a non-local site.
struct Marginals {
  Eigen::MatrixXd site;   // n x (m+1), rows sum to 1, forbidden entries 0
  Eigen::VectorXd cloud;  // n, in [0, 1]
};

struct McapOptions {
  int trials = 10;  // randomized rounding trials (K)
  std::uint64_t seed = 1;
  double sdp_tol = 1e-7;
  int sdp_max_iter = 20000;
  double alloc_tol = 1e-6;
  // On solver failure fall back to a uniform random valid profile instead
  // of raising; the returned meta records the substitution.
  bool fallback = true;
};

// Raised when the lifted solve fails and the fallback is disabled.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Copy of the scenario relabeled in Mbit / MHz / Gcycle units. Objective
// values, delays, and energies are numerically identical; indicator
// variables are unit-free. Assembling the lifted problem from the scaled
// copy keeps every matrix entry within a few orders of magnitude of 1, so
// the solver's absolute feasibility guarantees are meaningful.
Scenario scaled_units(const Scenario& s);

// Generic solve (sdp_solver.hpp) followed by a structural polish specific
// to this lifting: clamp negative entries, zero forbidden site entries,
// renormalize each user's site border block to sum exactly 1, clamp the
// cloud entry, shift the spectrum nonnegative, and re-pin the corner.
// Feasibility metrics and the objective are re-measured on the polished
// matrix; the certified bound is unaffected. Postconditions on the result:
// site/cloud border entries lie in [0, 1] exactly and the matrix is PSD up
// to measurement precision.
SdpSolution solve_sdp(const SdpForm& form, const Scenario& scenario,
                      const SdpSolveOptions& opts = {});

// Reads site and cloud border entries out of Z, clamps to [0, 1], zeroes
// forbidden sites, and normalizes each row; an all-zero row falls back to
// uniform over permitted sites. The cloud probability is conditioned on
// offloading: cloud_entry / (1 - P(local)), zero when P(local) >= 1 - 1e-9.
Marginals extract_marginals(const Eigen::MatrixXd& Z, const Scenario& scenario);

// K independent profiles drawn from the marginals. Trial t uses its own
// stream seeded by hash(seed, t), so trials can be evaluated in any order.
// Per user the site is drawn first; the cloud flag is drawn only for
// non-local sites and is forced false otherwise. Every returned profile is
// valid by construction.
std::vector<StrategyProfile> round_trials(const Marginals& m, int trials,
                                          std::uint64_t seed);

// Full pipeline. Returns the best trial by objective (ties: lowest trial
// index). meta records the certified relaxation bound, solver status, and
// the seed. Throws SolverFailure only when the solver fails and
// opts.fallback is false.
Solution mcap(const Scenario& scenario, const McapOptions& opts = {});

}  // namespace mcap
