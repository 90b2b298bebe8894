#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <limits>

#include "mcap/qcqp.hpp"

// SDP lifting of the QCQP: Z stands in for [w;1][w;1]', every constraint
// becomes Tr(G Z) (<=|=) rhs with the linear part split into the border
// row/column, and the rank-1 requirement is dropped. Z is constrained PSD
// and elementwise nonnegative; an explicit corner constraint Z(end,end) = 1
// pins the homogenizing entry.

namespace mcap {

struct SdpConstraint {
  ConstraintKind kind;
  int user = -1, cap = -1;
  std::vector<std::tuple<int, int, double>> entries;  // upper triangle of G
  bool equality = false;
  double rhs = 0;
  // Bilinear product rows touch matrix entries with no a-priori bound; the
  // solver zeroes their multipliers when assembling its certified dual
  // bound. All other rows participate.
  bool in_certificate = true;
};

struct SdpForm {
  int dim = 0;  // qcqp dimension + 1
  QcqpLayout layout;
  std::vector<std::tuple<int, int, double>> objective;  // G_0 upper triangle
  std::vector<SdpConstraint> constraints;  // the lifted rows, corner excluded
  SdpConstraint corner;                    // Z(end,end) = 1
  bool elementwise_nonneg = true;
  bool psd = true;

  // Provable bounds on entries of any optimal Z, used for the certified
  // dual bound and for diagonal preconditioning: border_bound[p] bounds
  // Z(p, end), diag_bound[p] bounds Z(p, p). +inf where unknown; filled by
  // apply_certificate_bounds.
  std::vector<double> border_bound, diag_bound;
};

SdpForm lift_to_sdp(const QcqpForm& q);

// Installs entry bounds derived from the constraint structure: indicator
// border/diagonal entries are at most 1 (site sums plus nonnegativity),
// bandwidth and CPU border entries are at most the capacities, and the
// auxiliary-time / round-time border entries are at most objective_ceiling
// (any known feasible objective value, e.g. the all-local cost, bounds the
// optimal t entry because every objective term is nonnegative).
void apply_certificate_bounds(SdpForm& s, const Scenario& scenario,
                              double objective_ceiling);

// Tr(G Z) for an upper-triangle entry list.
double trace_product(const std::vector<std::tuple<int, int, double>>& entries,
                     const Eigen::MatrixXd& Z);

// Lhs - rhs at Z.
double sdp_violation(const SdpConstraint& c, const Eigen::MatrixXd& Z);

// [w;1][w;1]' for cross-checks.
Eigen::MatrixXd lift_point(const Eigen::VectorXd& w);

// Sparse triplet text dumps (documented in the README).
void dump_qcqp(std::ostream& out, const QcqpForm& q);
void dump_sdp(std::ostream& out, const SdpForm& s);

}  // namespace mcap
