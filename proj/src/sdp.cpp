#include "mcap/sdp.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace mcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SdpConstraint lift_constraint(const QcqpConstraint& c, int border) {
  SdpConstraint out;
  out.kind = c.kind;
  out.user = c.user;
  out.cap = c.cap;
  out.equality = c.equality;
  out.rhs = c.rhs;
  out.entries.reserve(c.quad.size() + c.lin.size());
  for (const auto& [r, col, v] : c.quad) out.entries.emplace_back(r, col, v);
  for (const auto& [p, v] : c.lin) out.entries.emplace_back(p, border, v / 2);
  out.in_certificate = c.kind != ConstraintKind::BilinearUp &&
                       c.kind != ConstraintKind::BilinearDown &&
                       c.kind != ConstraintKind::BilinearProc;
  return out;
}

}  // namespace

SdpForm lift_to_sdp(const QcqpForm& q) {
  SdpForm s;
  s.layout = q.layout;
  s.dim = q.layout.dim() + 1;
  const int border = s.dim - 1;
  for (const auto& [p, v] : q.objective) s.objective.emplace_back(p, border, v / 2);
  for (const QcqpConstraint& c : q.constraints)
    s.constraints.push_back(lift_constraint(c, border));
  s.corner.kind = ConstraintKind::Corner;
  s.corner.entries.emplace_back(border, border, 1.0);
  s.corner.equality = true;
  s.corner.rhs = 1.0;
  s.elementwise_nonneg = q.nonneg_vars;
  s.psd = true;
  s.border_bound.assign(s.dim, kInf);
  s.diag_bound.assign(s.dim, kInf);
  s.border_bound[border] = 1.0;
  s.diag_bound[border] = 1.0;
  return s;
}

void apply_certificate_bounds(SdpForm& s, const Scenario& scenario,
                              double objective_ceiling) {
  const QcqpLayout& L = s.layout;
  const double v = objective_ceiling;
  for (int i = 0; i < L.n; ++i) {
    for (int j = 0; j <= L.m; ++j) {
      s.border_bound[L.x(i, j)] = 1.0;
      s.diag_bound[L.x(i, j)] = 1.0;
    }
    s.border_bound[L.theta(i)] = 1.0;
    s.diag_bound[L.theta(i)] = 1.0;
    for (int j = 1; j <= L.m; ++j) {
      const CapSpec& cap = scenario.caps[j - 1];
      s.border_bound[L.c_up(i, j)] = std::min(cap.c_ul, cap.c_total);
      s.border_bound[L.c_down(i, j)] = std::min(cap.c_dl, cap.c_total);
      s.border_bound[L.f_cap(i, j)] = cap.f_a;
      s.border_bound[L.d_up(i, j)] = v;
      s.border_bound[L.d_down(i, j)] = v;
      s.border_bound[L.d_cap(i, j)] = v;
    }
  }
  s.border_bound[L.t()] = v;
}

double trace_product(const std::vector<std::tuple<int, int, double>>& entries,
                     const Eigen::MatrixXd& Z) {
  double acc = 0;
  for (const auto& [r, c, v] : entries)
    acc += (r == c ? v * Z(r, c) : 2 * v * Z(r, c));
  return acc;
}

double sdp_violation(const SdpConstraint& c, const Eigen::MatrixXd& Z) {
  return trace_product(c.entries, Z) - c.rhs;
}

Eigen::MatrixXd lift_point(const Eigen::VectorXd& w) {
  Eigen::VectorXd z(w.size() + 1);
  z << w, 1.0;
  return z * z.transpose();
}

void dump_qcqp(std::ostream& out, const QcqpForm& q) {
  const QcqpLayout& L = q.layout;
  out << std::setprecision(17);
  out << "# mcap qcqp dump v1\n";
  out << "# quad lines: q row col coeff  (upper triangle of symmetric Q)\n";
  out << "# lin lines:  l index coeff\n";
  out << "dim " << L.dim() << "\n";
  out << "nonneg " << (q.nonneg_vars ? 1 : 0) << "\n";
  out << "vars " << L.dim() << "\n";
  for (int p = 0; p < L.dim(); ++p) out << p << " " << L.name(p) << "\n";
  out << "objective nnz " << q.objective.size() << "\n";
  for (const auto& [p, v] : q.objective) out << "l " << p << " " << v << "\n";
  out << "constraints " << q.constraints.size() << "\n";
  int k = 0;
  for (const QcqpConstraint& c : q.constraints) {
    out << "constraint " << k++ << " kind " << kind_name(c.kind) << " sense "
        << (c.equality ? "eq" : "le") << " rhs " << c.rhs << " quad "
        << c.quad.size() << " lin " << c.lin.size() << "\n";
    for (const auto& [r, col, v] : c.quad)
      out << "q " << r << " " << col << " " << v << "\n";
    for (const auto& [p, v] : c.lin) out << "l " << p << " " << v << "\n";
  }
}

void dump_sdp(std::ostream& out, const SdpForm& s) {
  out << std::setprecision(17);
  out << "# mcap sdp dump v1\n";
  out << "# entry lines: e row col coeff  (upper triangle of symmetric G)\n";
  out << "dim " << s.dim << "\n";
  out << "psd " << (s.psd ? 1 : 0) << "\n";
  out << "elementwise_nonneg " << (s.elementwise_nonneg ? 1 : 0) << "\n";
  out << "objective nnz " << s.objective.size() << "\n";
  for (const auto& [r, c, v] : s.objective)
    out << "e " << r << " " << c << " " << v << "\n";
  const auto dump_constraint = [&out](const SdpConstraint& c, int index) {
    out << "constraint " << index << " kind " << kind_name(c.kind) << " sense "
        << (c.equality ? "eq" : "le") << " rhs " << c.rhs << " nnz "
        << c.entries.size() << "\n";
    for (const auto& [r, col, v] : c.entries)
      out << "e " << r << " " << col << " " << v << "\n";
  };
  out << "constraints " << (s.constraints.size() + 1) << "\n";
  int k = 0;
  for (const SdpConstraint& c : s.constraints) dump_constraint(c, k++);
  dump_constraint(s.corner, k);
}

}  // namespace mcap
