#pragma once

#include "mcap/model.hpp"

// Convex resource allocation for a fixed strategy profile.
//
// Energies do not depend on the allocation, so the problem reduces to
// minimizing the round time. That min-max is separable per CAP: each CAP
// group solves
//
//   min t  s.t.  base_i + A_i/c_up + B_i/c_down + G_i/f ≤ t, capacities,
//
// a maximum of sums of positive reciprocals, handled here by a log-barrier
// Newton method on the epigraph form.

namespace mcap {

struct AllocResult {
  Allocation allocation;
  CostBreakdown costs;
  bool converged = false;
  double residual = 0;  // optimality gap estimate for the round time, seconds
};

// Returns an allocation whose objective is within tol (relative, default
// 1e-6) of the convex optimum. Users not assigned to a CAP hold exactly zero
// resources there; cloud-forwarded users hold zero CPU share. If nobody
// offloads, returns the all-zero allocation with pure local costs.
//
// Equal-objective tie-break: each offloaded user's resource vector is scaled
// down by the unique factor placing their delay exactly at the round time,
// so no surplus beyond the optimum is handed out.
//
// Throws std::invalid_argument for an invalid profile or tol <= 0.
AllocResult optimize_allocation(const StrategyProfile& profile,
                                const Scenario& scenario, double tol = 1e-6);

struct AllocBracket {
  double lower = 0;  // objective lower bound (uncontended closed form)
  double upper = 0;  // objective of the best grid point (feasible, so valid)
};

// Brute-force bracket used to bound optimize_allocation in tests. Bandwidth
// shares are enumerated on a grid of pitch grid_step_hz; for each bandwidth
// choice the CPU split has a monotone closed form and is solved by bisection
// (exact inner minimization only shrinks the upper bracket; every evaluated
// point is feasible).
//
// Throws std::invalid_argument if a CAP holds more than 3 users, M > 2, or
// the grid is too coarse to give every user a positive share.
AllocBracket allocation_oracle(const StrategyProfile& profile,
                               const Scenario& scenario, double grid_step_hz);

}  // namespace mcap
