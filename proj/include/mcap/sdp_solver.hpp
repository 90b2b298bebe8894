#pragma once

#include <Eigen/Core>
#include <string>

#include "mcap/sdp.hpp"

// First-order solver for the lifted problem: minimize Tr(G0 Z) over Z that
// satisfies the affine trace rows, is positive semidefinite, and is
// elementwise nonnegative. Uses consensus ADMM with one copy per cone, a
// penalty-independent factorization of the affine system, diagonal
// congruence preconditioning from the entry bounds, and a feasibility
// refinement pass (cyclic projections) after the main loop.
//
// Alongside the primal iterate the solver assembles a certified lower bound
// on the exact optimum: affine multipliers are sign-clamped so that any
// choice is dual feasible for the affine part, and the residual matrix
// R = G0 - sum y_r G_r is bounded below entrywise through the known entry
// bounds (border_bound / diag_bound in the form). The bound is valid at any
// solver tolerance; certificate_valid reports whether every negative
// residual entry had a finite bound available.

namespace mcap {

struct SdpSolveOptions {
  double tol = 1e-7;       // relative consensus residual target
  int max_iter = 20000;
  double rho = 1.0;        // initial penalty; adapted during the run
  double over_relax = 1.6;
  int refine_iters = 300;  // cyclic projection passes after ADMM
  int rho_adapt_every = 25;
};

enum class SdpStatus { Optimal, IterationLimit, Failed };

const char* status_name(SdpStatus s);

struct SdpSolution {
  Eigen::MatrixXd Z;  // original units, symmetric
  SdpStatus status = SdpStatus::Failed;
  int iterations = 0;
  double primal_objective = 0;  // Tr(G0 Z) at the returned Z

  // Lower bound on the exact optimum, valid whenever certificate_valid.
  double certified_lower_bound = 0;
  bool certificate_valid = false;

  // Feasibility of the returned Z: per-row violation divided by
  // max(1, |rhs|), worst case over equality and inequality rows.
  double max_eq_residual = 0;
  double max_ineq_violation = 0;
  double min_eigenvalue = 0;  // of the returned Z
  double min_entry = 0;
  std::string message;
};

SdpSolution solve_sdp(const SdpForm& form, const SdpSolveOptions& opts = {});

}  // namespace mcap
