#include "mcap/sdp_solver.hpp"

#include <lapacke.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace mcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

// Packed upper-triangle (svec) index for p <= q.
inline int svec_idx(int p, int q) { return q * (q + 1) / 2 + p; }

void svec(const Eigen::MatrixXd& M, Eigen::VectorXd& z) {
  const int d = static_cast<int>(M.rows());
  for (int q = 0; q < d; ++q)
    for (int p = 0; p <= q; ++p)
      z[svec_idx(p, q)] = (p == q) ? M(p, p) : kSqrt2 * M(p, q);
}

void unsvec(const Eigen::VectorXd& z, Eigen::MatrixXd& M) {
  const int d = static_cast<int>(M.rows());
  for (int q = 0; q < d; ++q)
    for (int p = 0; p <= q; ++p) {
      const double v = z[svec_idx(p, q)];
      if (p == q) {
        M(p, p) = v;
      } else {
        M(p, q) = M(q, p) = v / kSqrt2;
      }
    }
}

// Projection onto the PSD cone in svec coordinates. Reconstructs from
// whichever eigenvalue sign class is smaller.
class PsdProjector {
 public:
  explicit PsdProjector(int d) : d_(d), buf_(d, d), orig_(d, d), evals_(d) {}

  // Returns false only if both LAPACK and the Eigen fallback fail.
  bool project(Eigen::VectorXd& z) {
    unsvec(z, buf_);
    orig_ = buf_;
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', d_, buf_.data(), d_,
                              evals_.data());
    if (info != 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(orig_);
      if (es.info() != Eigen::Success) return false;
      buf_ = es.eigenvectors();
      evals_ = es.eigenvalues();
    }
    int n_pos = 0;
    for (int i = 0; i < d_; ++i) n_pos += evals_[i] > 0;
    if (n_pos == d_) return true;  // already PSD
    if (n_pos <= d_ - n_pos) {
      // Rebuild from the positive part (eigenvalues are ascending).
      if (n_pos == 0) {
        z.setZero();
        return true;
      }
      Eigen::MatrixXd v = buf_.rightCols(n_pos);
      Eigen::MatrixXd scaled =
          v * evals_.tail(n_pos).cwiseMax(0.0).asDiagonal();
      orig_.noalias() = scaled * v.transpose();
    } else {
      // Subtract the negative part from the original.
      const int n_neg = d_ - n_pos;
      Eigen::MatrixXd v = buf_.leftCols(n_neg);
      Eigen::MatrixXd scaled =
          v * evals_.head(n_neg).cwiseMin(0.0).asDiagonal();
      orig_.noalias() -= scaled * v.transpose();
    }
    orig_ = 0.5 * (orig_ + orig_.transpose()).eval();
    svec(orig_, z);
    return true;
  }

  // Smallest eigenvalue of a symmetric matrix, for reporting.
  double min_eigenvalue(const Eigen::MatrixXd& M) {
    buf_ = M;
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', d_, buf_.data(), d_,
                              evals_.data());
    if (info != 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          M, Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff();
    }
    return evals_.minCoeff();
  }

 private:
  int d_;
  Eigen::MatrixXd buf_, orig_;
  Eigen::VectorXd evals_;
};

struct PreparedRow {
  bool used = true;
  bool eq = false;
  double nrm = 1.0;   // svec norm before normalization
  double rhs = 0.0;   // normalized, preconditioned units
};

// Entry bound B(p, q) on an optimal Z, in original units. Diagonal entries
// use diag_bound; off-diagonal entries use the PSD minor bound
// sqrt(diag_p diag_q), improved by border_bound in the border column.
double entry_bound(const SdpForm& form, int p, int q) {
  if (p == q) return form.diag_bound[p];
  double cand = kInf;
  if (std::isfinite(form.diag_bound[p]) && std::isfinite(form.diag_bound[q]))
    cand = std::sqrt(form.diag_bound[p] * form.diag_bound[q]);
  if (q == form.dim - 1) cand = std::min(cand, form.border_bound[p]);
  return cand;
}

}  // namespace

const char* status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::IterationLimit:
      return "iteration-limit";
    case SdpStatus::Failed:
      return "failed";
  }
  return "unknown";
}

SdpSolution solve_sdp(const SdpForm& form, const SdpSolveOptions& opts) {
  SdpSolution out;
  const int d = form.dim;
  const int D = d * (d + 1) / 2;

  // Diagonal congruence scaling: work on Z' = S Z S with
  // S = diag(1 / max(1, border_bound)). Entries of Z' are O(1) at the
  // optimum; PSD and elementwise nonnegativity are preserved.
  Eigen::VectorXd inv_scale(d);  // 1 / S entries
  for (int p = 0; p < d; ++p) {
    const double b = form.border_bound[p];
    inv_scale[p] = std::isfinite(b) ? std::max(1.0, b) : 1.0;
  }

  // All affine rows: the lifted constraints plus the corner equality.
  std::vector<const SdpConstraint*> rows;
  rows.reserve(form.constraints.size() + 1);
  for (const SdpConstraint& c : form.constraints) rows.push_back(&c);
  rows.push_back(&form.corner);
  const int n_rows = static_cast<int>(rows.size());

  std::vector<PreparedRow> prep(n_rows);
  std::vector<int> active;  // indices of used rows
  active.reserve(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    prep[r].eq = rows[r]->equality;
    double nrm2 = 0;
    for (const auto& [p, q, v] : rows[r]->entries) {
      const double coeff =
          (p == q ? 1.0 : kSqrt2) * v * inv_scale[p] * inv_scale[q];
      nrm2 += coeff * coeff;
    }
    prep[r].nrm = std::sqrt(nrm2);
    if (prep[r].nrm < 1e-12) {
      // Structurally empty row: feasible iff the right side allows it.
      const bool ok = prep[r].eq ? std::abs(rows[r]->rhs) <= 1e-9
                                 : rows[r]->rhs >= -1e-9;
      if (!ok) {
        out.status = SdpStatus::Failed;
        out.message = "infeasible: empty constraint row with nonzero rhs";
        return out;
      }
      prep[r].used = false;
      prep[r].nrm = 1.0;
      continue;
    }
    prep[r].rhs = rows[r]->rhs / prep[r].nrm;
    active.push_back(r);
  }
  const int m = static_cast<int>(active.size());

  // Dense constraint matrix over svec coordinates, normalized rows.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, D);
  Eigen::VectorXd bhat(m);
  Eigen::VectorXd ineq(m);  // 1 on inequality rows (slack present)
  for (int k = 0; k < m; ++k) {
    const int r = active[k];
    for (const auto& [p, q, v] : rows[r]->entries) {
      const double coeff =
          (p == q ? 1.0 : kSqrt2) * v * inv_scale[p] * inv_scale[q];
      A(k, svec_idx(std::min(p, q), std::max(p, q))) += coeff / prep[r].nrm;
    }
    bhat[k] = prep[r].rhs;
    ineq[k] = prep[r].eq ? 0.0 : 1.0;
  }

  // Objective in preconditioned units, normalized once.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(D);
  for (const auto& [p, q, v] : form.objective) {
    const double coeff =
        (p == q ? 1.0 : kSqrt2) * v * inv_scale[p] * inv_scale[q];
    c[svec_idx(std::min(p, q), std::max(p, q))] += coeff;
  }
  const double obj_scale = std::max(1.0, c.norm());
  c /= obj_scale;

  // K0 = 0.5 A A' + diag(ineq) is penalty independent: one factorization
  // serves every iteration and every penalty rescaling. K1 = A A' +
  // diag(ineq) = 2 K0 - diag(ineq) drives the later projection passes.
  Eigen::MatrixXd K0 = 0.5 * (A * A.transpose());
  K0.diagonal() += ineq;
  Eigen::MatrixXd K1 = 2.0 * K0;
  K1.diagonal() -= ineq;
  const double ridge = 1e-12 * std::max(1.0, K0.trace() / std::max(1, m));
  K0.diagonal().array() += ridge;
  K1.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt0(K0), llt1(K1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success) {
    K0.diagonal().array() += 1e-8;
    K1.diagonal().array() += 1e-8;
    llt0.compute(K0);
    llt1.compute(K1);
    if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success) {
      out.status = SdpStatus::Failed;
      out.message = "affine system factorization failed";
      return out;
    }
  }

  PsdProjector psd(d);

  // Start from the identity in preconditioned units (corner entry 1).
  Eigen::MatrixXd Zmat = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd z(D);
  svec(Zmat, z);
  Eigen::VectorXd z1 = z, z2 = z;
  Eigen::VectorXd u1 = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd u2 = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd s = (bhat - A * z).cwiseProduct(ineq).cwiseMax(0.0);
  Eigen::VectorXd shat = s;
  Eigen::VectorXd us = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);

  double rho = opts.rho;
  const double alpha = opts.over_relax;
  bool converged = false;
  int iter = 0;

  Eigen::VectorXd v_z(D), zh(D), z1_prev(D), z2_prev(D), shat_prev(m);
  for (iter = 1; iter <= opts.max_iter; ++iter) {
    z1_prev = z1;
    z2_prev = z2;
    shat_prev = shat;

    // Affine step: equality-constrained quadratic in (z, s).
    v_z = 0.5 * (z1 - u1 + z2 - u2) - c / (2.0 * rho);
    const Eigen::VectorXd v_s = shat - us;
    lam = llt0.solve(A * v_z + v_s.cwiseProduct(ineq) - bhat);
    z = v_z - 0.5 * (A.transpose() * lam);
    s = (v_s - lam).cwiseProduct(ineq);

    // PSD copy.
    zh = alpha * z + (1.0 - alpha) * z1;
    z1 = zh + u1;
    if (!psd.project(z1)) {
      out.status = SdpStatus::Failed;
      out.message = "eigendecomposition failed";
      return out;
    }
    u1 += zh - z1;

    // Nonnegative copy. Off-diagonal svec entries carry a positive factor,
    // so the clamp in svec coordinates is exactly the matrix projection.
    zh = alpha * z + (1.0 - alpha) * z2;
    z2 = (zh + u2).cwiseMax(0.0);
    u2 += zh - z2;

    // Slack copy.
    const Eigen::VectorXd sh = alpha * s + (1.0 - alpha) * shat;
    shat = (sh + us).cwiseMax(0.0).cwiseProduct(ineq);
    us += sh - shat;

    const double r_prim =
        std::sqrt((z - z1).squaredNorm() + (z - z2).squaredNorm() +
                  (s - shat).squaredNorm());
    const double r_dual =
        rho * std::sqrt((z1 - z1_prev).squaredNorm() +
                        (z2 - z2_prev).squaredNorm() +
                        (shat - shat_prev).squaredNorm());
    const double p_scale =
        std::max({1.0, z.norm(), z1.norm(), z2.norm(), s.norm()});
    const double d_scale =
        std::max(1.0, rho * std::sqrt(u1.squaredNorm() + u2.squaredNorm() +
                                      us.squaredNorm()));
    const double rp = r_prim / p_scale;
    const double rd = r_dual / d_scale;
    if (rp <= opts.tol && rd <= opts.tol) {
      converged = true;
      break;
    }
    if (opts.rho_adapt_every > 0 && iter % opts.rho_adapt_every == 0) {
      if (rp > 10.0 * rd && rho < 1e6) {
        rho *= 2.0;
        u1 /= 2.0;
        u2 /= 2.0;
        us /= 2.0;
      } else if (rd > 10.0 * rp && rho > 1e-6) {
        rho /= 2.0;
        u1 *= 2.0;
        u2 *= 2.0;
        us *= 2.0;
      }
    }
  }
  out.iterations = std::min(iter, opts.max_iter);

  // Certified lower bound from the last affine multipliers. In the
  // preconditioned, row-normalized system the multiplier on row k is
  // rho * lam_k; undoing the objective normalization and the row
  // normalization gives multipliers for the original rows (traces are
  // invariant under the congruence). Equality multipliers are free;
  // inequality multipliers are clamped to the dual-feasible sign, so the
  // resulting bound is valid regardless of solver accuracy.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_rows);
  for (int k = 0; k < m; ++k) {
    const int r = active[k];
    if (!rows[r]->in_certificate) continue;
    double yr = -obj_scale * rho * lam[k] / prep[r].nrm;
    if (!prep[r].eq) yr = std::min(0.0, yr);
    y[r] = yr;
  }
  {
    Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(d, d);  // upper triangle
    for (const auto& [p, q, v] : form.objective)
      G0(std::min(p, q), std::max(p, q)) += v;
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(d, d);
    double by = 0;
    for (int r = 0; r < n_rows; ++r) {
      if (y[r] == 0.0) continue;
      by += y[r] * rows[r]->rhs;
      for (const auto& [p, q, v] : rows[r]->entries)
        Y(std::min(p, q), std::max(p, q)) += y[r] * v;
    }
    // Any scaling of a dual-feasible multiplier vector stays dual feasible,
    // and the entrywise bound is concave in the scale, so a short scan picks
    // the best certificate the extracted duals can support. Scale zero
    // prices the bare objective, which certifies zero whenever G0 has no
    // negative entries.
    out.certificate_valid = false;
    out.certified_lower_bound = -kInf;
    for (const double gamma : {1.0, 0.75, 0.5, 0.25, 0.0}) {
      double bound = gamma * by;
      bool valid = true;
      for (int q = 0; q < d && valid; ++q)
        for (int p = 0; p <= q; ++p) {
          const double rv = G0(p, q) - gamma * Y(p, q);
          if (rv >= 0) continue;
          const double B = entry_bound(form, p, q);
          if (!std::isfinite(B)) {
            // Unbounded entry with negative residual: not certifiable.
            valid = false;
            break;
          }
          bound += (p == q ? 1.0 : 2.0) * rv * B;
        }
      if (valid && bound > out.certified_lower_bound) {
        out.certificate_valid = true;
        out.certified_lower_bound = bound;
      }
    }
  }

  // Feasibility refinement: cyclic projections PSD -> nonneg -> affine.
  // The affine step is the exact projection in (z, s) space, so the
  // returned iterate closes the trace rows to near machine precision.
  for (int k = 0; k < opts.refine_iters; ++k) {
    if (!psd.project(z)) break;
    z = z.cwiseMax(0.0);
    s = s.cwiseMax(0.0).cwiseProduct(ineq);
    const Eigen::VectorXd mu =
        llt1.solve(A * z + s.cwiseProduct(ineq) - bhat);
    z -= A.transpose() * mu;
    s -= mu.cwiseProduct(ineq);
  }

  // Undo the congruence and report honest measurements on the result.
  unsvec(z, Zmat);
  for (int q = 0; q < d; ++q)
    for (int p = 0; p < d; ++p) Zmat(p, q) *= inv_scale[p] * inv_scale[q];
  out.Z = 0.5 * (Zmat + Zmat.transpose());
  out.primal_objective = trace_product(form.objective, out.Z);
  for (int r = 0; r < n_rows; ++r) {
    const double v = sdp_violation(*rows[r], out.Z);
    const double denom = std::max(1.0, std::abs(rows[r]->rhs));
    if (rows[r]->equality) {
      out.max_eq_residual = std::max(out.max_eq_residual, std::abs(v) / denom);
    } else {
      out.max_ineq_violation =
          std::max(out.max_ineq_violation, std::max(v, 0.0) / denom);
    }
  }
  out.min_entry = out.Z.minCoeff();
  out.min_eigenvalue = psd.min_eigenvalue(out.Z);
  if (!out.Z.allFinite()) {
    out.status = SdpStatus::Failed;
    out.message = "solution contains non-finite entries";
    return out;
  }

  out.status = converged ? SdpStatus::Optimal : SdpStatus::IterationLimit;
  std::ostringstream msg;
  msg << (converged ? "converged" : "iteration limit") << " after "
      << out.iterations << " iterations, penalty " << rho;
  out.message = msg.str();
  return out;
}

}  // namespace mcap
