#include "wed/functional.hpp"

#include <cmath>
#include <sstream>

namespace wed {

void WedConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("wed.epsilon must be positive");
  RegularizationLevel check(lambda);
  if (steps < 2) throw ConfigError("wed.M must be at least 2");
}

WedEvaluator::WedEvaluator(const ProblemInstance& inst, const WedConfig& cfg)
    : inst_(inst),
      cfg_(cfg),
      resolvent_(inst.grid, RegularizationLevel(cfg.lambda)),
      reflected_kernel_(reflect_kernel(inst.dissipation.kernel())) {
  cfg_.validate();
}

void WedEvaluator::check_admissible(const Trajectory& traj) const {
  if (traj.nodes() != inst_.grid.size()) throw ConfigError("trajectory does not live on the instance grid");
  if (traj.steps() != cfg_.steps) {
    std::ostringstream msg;
    msg << "trajectory has " << traj.steps() << " steps, configuration expects " << cfg_.steps;
    throw ConfigError(msg.str());
  }
  if (traj.horizon() != inst_.horizon) throw ConfigError("trajectory horizon differs from the instance horizon");
  if (traj.states().row(0) != inst_.u0.transpose())
    throw ConfigError("trajectory is not admissible: state at t = 0 differs from u0");
}

void WedEvaluator::check_finite(double value, int m, const char* what) const {
  if (std::isfinite(value)) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " at time node " << m << " (t = " << m * inst_.horizon / cfg_.steps << ")";
  throw NumericalError(msg.str());
}

WedEvaluator::NodeTerms WedEvaluator::node(const Trajectory& traj, int m, bool with_gradient) const {
  const SpatialGrid& grid = inst_.grid;
  const double lambda = cfg_.lambda;
  const Vector u = traj.state(m);
  const Vector rate = traj.rate(m);
  const Vector ju = resolvent_.apply(u);
  const CoefficientField field = coefficient_field(inst_, ju);

  NodeTerms t;
  t.psi = 0.5 * grid.spacing() * field.g.dot(rate.cwiseAbs2());
  if (lambda > 0.0) {
    const double dist = grid.norm(u - ju);
    t.phi1 = 0.5 / lambda * dist * dist + phi1(grid, ju);
  } else {
    t.phi1 = phi1(grid, u);
  }
  t.phi2 = phi2_lambda(inst_.potential, grid, u, lambda);
  check_finite(t.psi, m, "dissipation term");
  check_finite(t.phi1 + t.phi2, m, "energy term");

  if (with_gradient) {
    t.xi = field.g.cwiseProduct(rate);
    t.gamma = convolve(reflected_kernel_, grid, 0.5 * field.dg.cwiseProduct(rate.cwiseAbs2()));
    t.eta1 = lambda > 0.0 ? Vector((u - ju) / lambda) : apply_A(grid, u);
    t.eta2 = d_phi2_lambda(inst_.potential, u, lambda);
  }
  return t;
}

WedBreakdown WedEvaluator::value(const Trajectory& traj) const {
  check_admissible(traj);
  WedBreakdown b;
  const double tau = traj.tau();
  for (int m = 1; m <= traj.steps(); ++m) {
    const NodeTerms t = node(traj, m, false);
    const double w = tau * cfg_.weight(traj.time(m));
    b.dissipation_part += w * cfg_.epsilon * t.psi;
    b.phi1_part += w * t.phi1;
    b.phi2_part += w * t.phi2;
  }
  b.total = b.dissipation_part + b.phi1_part + b.phi2_part;
  check_finite(b.total, traj.steps(), "functional value");
  return b;
}

double WedEvaluator::window(const Trajectory& traj, int first, int last, RowMatrix* normalized) const {
  const int steps = traj.steps();
  if (first < 1 || last > steps || first > last) throw ConfigError("invalid time window");
  if (normalized && cfg_.lambda == 0.0 && !inst_.potential.smooth)
    throw ConfigError("the functional is not differentiable for nonsmooth beta with lambda = 0; use lambda > 0");

  const double tau = traj.tau();
  const double eps = cfg_.epsilon;
  const int end = std::min(last + 1, steps);

  std::vector<NodeTerms> terms;
  terms.reserve(static_cast<std::size_t>(end - first + 1));
  double value = 0.0;
  for (int m = first; m <= end; ++m) {
    terms.push_back(node(traj, m, normalized != nullptr));
    const NodeTerms& t = terms.back();
    value += tau * std::exp(-(m - first) * tau / eps) * (eps * t.psi + t.phi1 + t.phi2);
  }

  if (normalized) {
    const double decay = std::exp(-tau / eps);
    normalized->resize(last - first + 1, traj.nodes());
    for (int m = first; m <= last; ++m) {
      const NodeTerms& t = terms[static_cast<std::size_t>(m - first)];
      Vector g = eps * (t.xi / tau + resolvent_.apply(t.gamma)) + t.eta1 + t.eta2;
      if (m < steps) g -= decay * eps / tau * terms[static_cast<std::size_t>(m + 1 - first)].xi;
      normalized->row(m - first) = g.transpose();
    }
  }
  return value;
}

RowMatrix WedEvaluator::normalized_gradient(const Trajectory& traj) const {
  check_admissible(traj);
  RowMatrix inner;
  window(traj, 1, traj.steps(), &inner);
  RowMatrix out = RowMatrix::Zero(traj.steps() + 1, traj.nodes());
  out.bottomRows(traj.steps()) = inner;
  return out;
}

ElResidual WedEvaluator::el_residual(const Trajectory& traj) const {
  check_admissible(traj);
  const int steps = traj.steps();
  const int n = traj.nodes();
  const double tau = traj.tau();
  const double eps = cfg_.epsilon;
  const SpatialGrid& grid = inst_.grid;

  ElResidual el;
  el.xi = el.gamma = el.eta1 = el.eta2 = el.residual = RowMatrix::Zero(steps + 1, n);
  RowMatrix j_gamma = RowMatrix::Zero(steps + 1, n);
  for (int m = 1; m <= steps; ++m) {
    const NodeTerms t = node(traj, m, true);
    el.xi.row(m) = t.xi.transpose();
    el.gamma.row(m) = t.gamma.transpose();
    el.eta1.row(m) = t.eta1.transpose();
    el.eta2.row(m) = t.eta2.transpose();
    j_gamma.row(m) = resolvent_.apply(t.gamma).transpose();
  }

  el.residual_norm = Vector::Zero(steps + 1);
  el.xi_norm = Vector::Zero(steps + 1);
  double sum_sq = 0.0;
  for (int m = 1; m <= steps; ++m) {
    // Backward difference of xi; node 1 has no predecessor and uses the first
    // available difference.
    const int hi = m >= 2 ? m : std::min(2, steps);
    const auto xi_dot = (el.xi.row(hi) - el.xi.row(hi - 1)) / tau;
    el.residual.row(m) = -eps * xi_dot + el.xi.row(m) + eps * j_gamma.row(m) + el.eta1.row(m) + el.eta2.row(m);
    el.residual_norm(m) = grid.norm(el.residual.row(m).transpose());
    el.xi_norm(m) = grid.norm(el.xi.row(m).transpose());
    el.max_norm = std::max(el.max_norm, el.residual_norm(m));
    sum_sq += tau * el.residual_norm(m) * el.residual_norm(m);
  }
  el.l2_norm = std::sqrt(sum_sq);
  el.terminal_xi_norm = el.xi_norm(steps);
  const Vector defect = (eps * el.xi.row(steps) +
                         tau * (eps * j_gamma.row(steps) + el.eta1.row(steps) + el.eta2.row(steps)))
                            .transpose();
  el.terminal_defect_norm = grid.norm(defect);
  check_finite(el.l2_norm, steps, "Euler-Lagrange residual");
  return el;
}

WedBreakdown wed_value(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  return WedEvaluator(inst, cfg).value(traj);
}

RowMatrix wed_gradient(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  RowMatrix g = WedEvaluator(inst, cfg).normalized_gradient(traj);
  for (int m = 1; m <= traj.steps(); ++m) g.row(m) *= traj.tau() * cfg.weight(traj.time(m));
  return g;
}

ElResidual el_residual(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  return WedEvaluator(inst, cfg).el_residual(traj);
}

double wed_penalized_value(const Trajectory& traj, const Trajectory& anchor, const ProblemInstance& inst,
                           const WedConfig& cfg) {
  if (anchor.steps() != traj.steps() || anchor.nodes() != traj.nodes() || anchor.horizon() != traj.horizon())
    throw ConfigError("penalization anchor must share the trajectory discretization");
  WedEvaluator eval(inst, cfg);
  eval.check_admissible(anchor);
  double penalty = 0.0;
  for (int m = 1; m <= traj.steps(); ++m) {
    const double d = inst.grid.norm((traj.state(m) - anchor.state(m)).eval());
    penalty += traj.tau() * cfg.weight(traj.time(m)) * 0.5 * d * d;
  }
  return eval.value(traj).total + penalty;
}

double chain_rule_check(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  WedEvaluator eval(inst, cfg);
  eval.check_admissible(traj);
  const SpatialGrid& grid = inst.grid;
  const ResolventA& resolvent = eval.resolvent();
  const Vector reflected = reflect_kernel(inst.dissipation.kernel());
  const double tau = traj.tau();

  struct Local {
    double psi;
    Vector rate, xi, gamma;
  };
  auto local = [&](int m) {
    const Vector rate = traj.rate(m);
    const CoefficientField f = coefficient_field(inst, resolvent.apply(traj.state(m)));
    return Local{0.5 * grid.spacing() * f.g.dot(rate.cwiseAbs2()), rate, f.g.cwiseProduct(rate),
                 convolve(reflected, grid, 0.5 * f.dg.cwiseProduct(rate.cwiseAbs2()))};
  };

  double worst = 0.0;
  Local cur = local(1);
  for (int m = 1; m < traj.steps(); ++m) {
    Local next = local(m + 1);
    const double lhs = (next.psi - cur.psi) / tau;
    const Vector accel = (next.rate - cur.rate) / tau;
    const double rhs = grid.inner(cur.xi, accel) + grid.inner(cur.gamma, resolvent.apply(cur.rate));
    worst = std::max(worst, std::abs(lhs - rhs));
    cur = std::move(next);
  }
  return worst;
}

double energy_estimate_excess(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  WedEvaluator eval(inst, cfg);
  eval.check_admissible(traj);
  const SpatialGrid& grid = inst.grid;
  double dissipated = 0.0;
  for (int m = 1; m <= traj.steps(); ++m) {
    const Vector rate = traj.rate(m);
    const Vector xi = d2_psi(inst, eval.resolvent().apply(traj.state(m)), rate);
    dissipated += traj.tau() * grid.inner(xi, rate);
  }
  auto energy = [&](const Vector& u) {
    return phi1_lambda(grid, u, cfg.lambda) + phi2_lambda(inst.potential, grid, u, cfg.lambda);
  };
  return dissipated + energy(traj.state(traj.steps())) - energy(inst.u0);
}

}  // namespace wed
