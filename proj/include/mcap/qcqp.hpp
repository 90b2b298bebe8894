#pragma once

#include <Eigen/Core>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mcap/model.hpp"

// Exact QCQP reformulation of the joint offloading + allocation problem.
//
// The flat variable vector w stacks, in this order:
//   x[i][j]   site indicators, j = 0..M           N*(M+1)
//   theta[i]  cloud indicators                     N
//   cu[i][j]  uplink bandwidth   (j = 1..M)        N*M
//   Du[i][j]  uplink time                          N*M
//   cd[i][j]  downlink bandwidth                   N*M
//   Dd[i][j]  downlink time                        N*M
//   fa[i][j]  CAP CPU share                        N*M
//   Da[i][j]  CAP processing time                  N*M
//   t         round time                           1
// for a total of 7MN + 2N + 1 entries. Binary constraints v(v-1) = 0 relax
// the indicators; the bilinear rows tie the auxiliary times to bandwidths
// (demand * x <= eta * c * D and cycles * x * (1 - theta) <= f * Da).

namespace mcap {

struct QcqpLayout {
  int n = 0, m = 0;

  int dim() const { return 7 * m * n + 2 * n + 1; }
  int x(int i, int j) const { return i * (m + 1) + j; }  // j in 0..m
  int theta(int i) const { return n * (m + 1) + i; }
  int c_up(int i, int j) const { return block(0, i, j); }
  int d_up(int i, int j) const { return block(1, i, j); }
  int c_down(int i, int j) const { return block(2, i, j); }
  int d_down(int i, int j) const { return block(3, i, j); }
  int f_cap(int i, int j) const { return block(4, i, j); }
  int d_cap(int i, int j) const { return block(5, i, j); }
  int t() const { return dim() - 1; }

  std::string name(int index) const;

 private:
  int block(int which, int i, int j) const {
    return n * (m + 2) + which * m * n + i * m + (j - 1);  // j in 1..m
  }
};

enum class ConstraintKind {
  Delay,        // per-user epigraph row
  BilinearUp,   // d_in * x <= eta_u * cu * Du
  BilinearDown,
  BilinearProc,  // cycles * x * (1 - theta) <= fa * Da
  SiteSum,       // sum_j x[i][j] = 1
  CloudLimit,    // theta_i <= sum_{j>=1} x[i][j]
  CapUplink,
  CapDownlink,
  CapTotal,
  CapCpu,
  Binary,     // v^2 - v = 0
  Placement,  // sum over forbidden CAPs of x = 0
  Corner,     // homogenizing entry Z(end,end) = 1 (SDP only)
};
const char* kind_name(ConstraintKind kind);

// One constraint w' Q w + b' w (<= | =) rhs with Q symmetric; quad stores
// the upper triangle of Q (r <= c), so an off-diagonal entry v contributes
// 2*v*w_r*w_c.
struct QcqpConstraint {
  ConstraintKind kind;
  int user = -1, cap = -1;  // provenance, -1 where not applicable
  std::vector<std::tuple<int, int, double>> quad;
  std::vector<std::pair<int, double>> lin;
  bool equality = false;
  double rhs = 0;
};

struct QcqpForm {
  QcqpLayout layout;
  std::vector<std::pair<int, double>> objective;  // linear vector b_0
  std::vector<QcqpConstraint> constraints;
  bool nonneg_vars = true;  // w >= 0 elementwise (kept as a flag, not rows)
};

// Emits the full constraint system for the given scenario. Assembly is
// generated from the mathematical constraints; correctness is pinned by the
// equivalence tests against direct formula evaluation.
QcqpForm assemble_qcqp(const Scenario& scenario);

// Evaluates "lhs - rhs" of one constraint at w.
double constraint_violation(const QcqpConstraint& c, const Eigen::VectorXd& w);

// Objective b_0' w.
double qcqp_objective(const QcqpForm& q, const Eigen::VectorXd& w);

// The feasible integral point for a valid profile + feasible allocation:
// indicator entries, allocation entries, tight auxiliary times, and the
// round time. Useful for cross-checks and debugging dumps.
Eigen::VectorXd integral_point(const StrategyProfile& profile,
                               const Allocation& alloc,
                               const Scenario& scenario);

}  // namespace mcap
