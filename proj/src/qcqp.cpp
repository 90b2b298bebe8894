#include "mcap/qcqp.hpp"

#include <stdexcept>

namespace mcap {

std::string QcqpLayout::name(int index) const {
  const auto sub = [](int flat, int width) {
    return "[" + std::to_string(flat / width) + "][" +
           std::to_string(flat % width) + "]";
  };
  if (index < n * (m + 1)) return "x" + sub(index, m + 1);
  index -= n * (m + 1);
  if (index < n) return "theta[" + std::to_string(index) + "]";
  index -= n;
  static const char* blocks[] = {"cu", "Du", "cd", "Dd", "fa", "Da"};
  for (const char* b : blocks) {
    if (index < n * m) {
      // CAP subscripts are 1-based to match Strategy::site.
      return std::string(b) + "[" + std::to_string(index / m) + "][" +
             std::to_string(index % m + 1) + "]";
    }
    index -= n * m;
  }
  return "t";
}

const char* kind_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Delay: return "delay";
    case ConstraintKind::BilinearUp: return "bilinear-up";
    case ConstraintKind::BilinearDown: return "bilinear-down";
    case ConstraintKind::BilinearProc: return "bilinear-proc";
    case ConstraintKind::SiteSum: return "site-sum";
    case ConstraintKind::CloudLimit: return "cloud-limit";
    case ConstraintKind::CapUplink: return "cap-uplink";
    case ConstraintKind::CapDownlink: return "cap-downlink";
    case ConstraintKind::CapTotal: return "cap-total";
    case ConstraintKind::CapCpu: return "cap-cpu";
    case ConstraintKind::Binary: return "binary";
    case ConstraintKind::Placement: return "placement";
    case ConstraintKind::Corner: return "corner";
  }
  return "?";
}

QcqpForm assemble_qcqp(const Scenario& scenario) {
  scenario.validate();
  QcqpForm form;
  const int n = scenario.n_users(), m = scenario.n_caps();
  form.layout = {n, m};
  const QcqpLayout& L = form.layout;

  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    form.objective.emplace_back(L.x(i, 0), task.alpha * task.local_energy());
    const double e_cap = task.alpha * (task.tx_energy() + task.rx_energy());
    for (int j = 1; j <= m; ++j) form.objective.emplace_back(L.x(i, j), e_cap);
    form.objective.emplace_back(L.theta(i),
                                task.alpha * task.beta * task.cloud_utility);
  }
  form.objective.emplace_back(L.t(), 1.0);

  // Delay epigraph rows.
  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    QcqpConstraint c{ConstraintKind::Delay, i, -1, {}, {}, false, 0.0};
    c.lin.emplace_back(L.x(i, 0), task.local_time());
    for (int j = 1; j <= m; ++j) {
      c.lin.emplace_back(L.d_up(i, j), 1.0);
      c.lin.emplace_back(L.d_down(i, j), 1.0);
      c.lin.emplace_back(L.d_cap(i, j), 1.0);
    }
    c.lin.emplace_back(L.theta(i), cloud_chain_delay(task, scenario.cloud));
    c.lin.emplace_back(L.t(), -1.0);
    form.constraints.push_back(std::move(c));
  }

  // Bilinear rows tying auxiliary times to allocated resources. Off-diagonal
  // quad entries hold half the product coefficient.
  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    for (int j = 1; j <= m; ++j) {
      QcqpConstraint c{ConstraintKind::BilinearUp, i, j, {}, {}, false, 0.0};
      c.lin.emplace_back(L.x(i, j), task.d_in);
      c.quad.emplace_back(std::min(L.c_up(i, j), L.d_up(i, j)),
                          std::max(L.c_up(i, j), L.d_up(i, j)),
                          -task.eta_up[j - 1] / 2);
      form.constraints.push_back(std::move(c));
    }
  }
  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    for (int j = 1; j <= m; ++j) {
      QcqpConstraint c{ConstraintKind::BilinearDown, i, j, {}, {}, false, 0.0};
      c.lin.emplace_back(L.x(i, j), task.d_out);
      c.quad.emplace_back(std::min(L.c_down(i, j), L.d_down(i, j)),
                          std::max(L.c_down(i, j), L.d_down(i, j)),
                          -task.eta_down[j - 1] / 2);
      form.constraints.push_back(std::move(c));
    }
  }
  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    for (int j = 1; j <= m; ++j) {
      QcqpConstraint c{ConstraintKind::BilinearProc, i, j, {}, {}, false, 0.0};
      c.lin.emplace_back(L.x(i, j), task.cycles);
      c.quad.emplace_back(std::min(L.x(i, j), L.theta(i)),
                          std::max(L.x(i, j), L.theta(i)), -task.cycles / 2);
      c.quad.emplace_back(std::min(L.f_cap(i, j), L.d_cap(i, j)),
                          std::max(L.f_cap(i, j), L.d_cap(i, j)), -0.5);
      form.constraints.push_back(std::move(c));
    }
  }

  // Exactly one site per user; cloud only through a CAP.
  for (int i = 0; i < n; ++i) {
    QcqpConstraint c{ConstraintKind::SiteSum, i, -1, {}, {}, true, 1.0};
    for (int j = 0; j <= m; ++j) c.lin.emplace_back(L.x(i, j), 1.0);
    form.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i) {
    QcqpConstraint c{ConstraintKind::CloudLimit, i, -1, {}, {}, false, 0.0};
    c.lin.emplace_back(L.theta(i), 1.0);
    for (int j = 1; j <= m; ++j) c.lin.emplace_back(L.x(i, j), -1.0);
    form.constraints.push_back(std::move(c));
  }

  // Capacity rows.
  for (int j = 1; j <= m; ++j) {
    QcqpConstraint c{ConstraintKind::CapUplink, -1, j, {}, {}, false,
                     scenario.caps[j - 1].c_ul};
    for (int i = 0; i < n; ++i) c.lin.emplace_back(L.c_up(i, j), 1.0);
    form.constraints.push_back(std::move(c));
  }
  for (int j = 1; j <= m; ++j) {
    QcqpConstraint c{ConstraintKind::CapDownlink, -1, j, {}, {}, false,
                     scenario.caps[j - 1].c_dl};
    for (int i = 0; i < n; ++i) c.lin.emplace_back(L.c_down(i, j), 1.0);
    form.constraints.push_back(std::move(c));
  }
  for (int j = 1; j <= m; ++j) {
    QcqpConstraint c{ConstraintKind::CapTotal, -1, j, {}, {}, false,
                     scenario.caps[j - 1].c_total};
    for (int i = 0; i < n; ++i) {
      c.lin.emplace_back(L.c_up(i, j), 1.0);
      c.lin.emplace_back(L.c_down(i, j), 1.0);
    }
    form.constraints.push_back(std::move(c));
  }
  for (int j = 1; j <= m; ++j) {
    QcqpConstraint c{ConstraintKind::CapCpu, -1, j, {}, {}, false,
                     scenario.caps[j - 1].f_a};
    for (int i = 0; i < n; ++i) c.lin.emplace_back(L.f_cap(i, j), 1.0);
    form.constraints.push_back(std::move(c));
  }

  // Binary relaxation rows v^2 - v = 0 for every indicator.
  for (int p = 0; p < n * (m + 2); ++p) {
    QcqpConstraint c{ConstraintKind::Binary, p < n * (m + 1) ? p / (m + 1) : p - n * (m + 1),
                     -1, {}, {}, true, 0.0};
    c.quad.emplace_back(p, p, 1.0);
    c.lin.emplace_back(p, -1.0);
    form.constraints.push_back(std::move(c));
  }

  // Placement rows (possibly empty sums; emitted regardless so the count is
  // a pure function of N and M).
  for (int i = 0; i < n; ++i) {
    QcqpConstraint c{ConstraintKind::Placement, i, -1, {}, {}, true, 0.0};
    for (int j : scenario.tasks[i].forbidden) c.lin.emplace_back(L.x(i, j), 1.0);
    form.constraints.push_back(std::move(c));
  }

  return form;
}

double constraint_violation(const QcqpConstraint& c, const Eigen::VectorXd& w) {
  double lhs = 0;
  for (const auto& [r, col, v] : c.quad)
    lhs += (r == col ? v * w[r] * w[r] : 2 * v * w[r] * w[col]);
  for (const auto& [p, v] : c.lin) lhs += v * w[p];
  return lhs - c.rhs;
}

double qcqp_objective(const QcqpForm& q, const Eigen::VectorXd& w) {
  double val = 0;
  for (const auto& [p, v] : q.objective) val += v * w[p];
  return val;
}

Eigen::VectorXd integral_point(const StrategyProfile& profile,
                               const Allocation& alloc,
                               const Scenario& scenario) {
  if (!validate_profile(profile, scenario).ok())
    throw std::invalid_argument("integral_point: invalid profile");
  const int n = scenario.n_users(), m = scenario.n_caps();
  const QcqpLayout L{n, m};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(L.dim());
  double t = 0;
  for (int i = 0; i < n; ++i) {
    const Task& task = scenario.tasks[i];
    const Strategy& s = profile[i];
    w[L.x(i, s.site)] = 1.0;
    double delay;
    if (s.is_local()) {
      delay = task.local_time();
    } else {
      const int j = s.site;
      const double cu = alloc.c_up(i, j), cd = alloc.c_down(i, j);
      w[L.c_up(i, j)] = cu;
      w[L.c_down(i, j)] = cd;
      w[L.d_up(i, j)] = task.d_in / (task.eta_up[j - 1] * cu);
      w[L.d_down(i, j)] = task.d_out / (task.eta_down[j - 1] * cd);
      delay = w[L.d_up(i, j)] + w[L.d_down(i, j)];
      if (s.cloud) {
        w[L.theta(i)] = 1.0;
        delay += cloud_chain_delay(task, scenario.cloud);
      } else {
        const double fc = alloc.f_cap(i, j);
        w[L.f_cap(i, j)] = fc;
        w[L.d_cap(i, j)] = task.cycles / fc;
        delay += w[L.d_cap(i, j)];
      }
    }
    t = std::max(t, delay);
  }
  w[L.t()] = t;
  return w;
}

}  // namespace mcap
