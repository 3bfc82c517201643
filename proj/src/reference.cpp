#include "wed/reference.hpp"

#include "wed/moreau_yosida.hpp"
#include "wed/tridiagonal.hpp"

#include <cmath>
#include <sstream>

namespace wed {

void StepperConfig::validate() const {
  if (steps < 1) throw ConfigError("reference.M must be positive");
  if (!(newton_tol > 0.0)) throw ConfigError("reference.newton_tol must be positive");
  if (newton_max < 1) throw ConfigError("reference.newton_max must be positive");
}

namespace {

// Reaction term b(u) and its derivative: beta on the smooth path, the Yosida
// approximation at level tau otherwise.
struct Reaction {
  const ConvexPotential& potential;
  double level;

  void eval(const Vector& u, Vector& value, Vector& slope) const {
    value.resize(u.size());
    slope.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (potential.smooth) {
        value(i) = potential.select(u(i));
        slope(i) = potential.slope(u(i));
      } else {
        const double r = resolve_beta(potential, u(i), level);
        value(i) = (u(i) - r) / level;
        const double dr = potential.set_valued_at(r) ? 0.0 : 1.0 / (1.0 + level * potential.slope(r));
        slope(i) = (1.0 - dr) / level;
      }
    }
  }
};

Matrix convolution_matrix(const ProblemInstance& inst) {
  const int n = inst.grid.size();
  const Vector& k = inst.dissipation.kernel();
  Matrix K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) K(i, j) = inst.grid.spacing() * k(i - j + n - 1);
  return K;
}

}  // namespace

Vector step(const Vector& u_prev, double tau, const ProblemInstance& inst, const StepperConfig& cfg) {
  if (!(tau > 0.0)) throw ConfigError("time step must be positive");
  const SpatialGrid& grid = inst.grid;
  grid.check_state(u_prev, "step");
  const int n = grid.size();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const Reaction reaction{inst.potential, tau};
  const bool implicit = cfg.g_evaluation == CoefficientEvaluation::implicit;
  const Matrix K = implicit ? convolution_matrix(inst) : Matrix();

  Vector coeff = coefficient_field(inst, u_prev).g;
  Vector dcoeff = Vector::Zero(n);
  const double scale = 1.0 + grid.norm((coeff.cwiseProduct(u_prev) / tau).eval());

  Vector b, db;
  auto residual = [&](const Vector& u) {
    if (implicit) {
      const CoefficientField f = coefficient_field(inst, u);
      coeff = f.g;
      dcoeff = f.dg;
    }
    reaction.eval(u, b, db);
    return Vector(coeff.cwiseProduct(u - u_prev) / tau + apply_A(grid, u) + b);
  };

  Vector u = u_prev;
  Vector F = residual(u);
  double norm = grid.norm(F);
  for (int it = 0; it < cfg.newton_max; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= cfg.newton_tol * scale) return u;
    Vector delta;
    if (implicit) {
      Matrix J = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        J(i, i) = coeff(i) / tau + 2.0 * inv_h2 + db(i);
        if (i > 0) J(i, i - 1) = -inv_h2;
        if (i + 1 < n) J(i, i + 1) = -inv_h2;
      }
      J += ((u - u_prev) / tau).cwiseProduct(dcoeff).asDiagonal() * K;
      delta = J.partialPivLu().solve(F);
    } else {
      const Vector diag = coeff / tau + db + Vector::Constant(n, 2.0 * inv_h2);
      delta = SymmetricTridiagonal<double>(diag, Vector::Constant(n - 1, -inv_h2)).solve(F);
    }
    // Damped update: halve until the residual decreases.
    double t = 1.0;
    Vector trial = u - delta;
    Vector F_trial = residual(trial);
    double trial_norm = grid.norm(F_trial);
    while (!(trial_norm <= (1.0 - 1e-4 * t) * norm) && t > 1e-8) {
      t *= 0.5;
      trial = u - t * delta;
      F_trial = residual(trial);
      trial_norm = grid.norm(F_trial);
    }
    if (!(trial_norm <= norm)) {
      // Rounding floor reached; accept only if already close.
      if (norm <= 1e3 * cfg.newton_tol * scale) return u;
      break;
    }
    u = std::move(trial);
    F = std::move(F_trial);
    norm = trial_norm;
  }
  if (norm <= cfg.newton_tol * scale) return u;
  std::ostringstream msg;
  msg.precision(6);
  msg << "Newton did not converge: residual " << norm << " after " << cfg.newton_max << " iterations";
  throw NumericalError(msg.str());
}

Trajectory solve_flow(const ProblemInstance& inst, const StepperConfig& cfg) {
  cfg.validate();
  inst.validate();
  const double tau = inst.horizon / cfg.steps;
  Trajectory traj = Trajectory::constant(inst.u0, cfg.steps, inst.horizon);
  for (int m = 1; m <= cfg.steps; ++m) {
    try {
      traj.state(m) = step(traj.state(m - 1), tau, inst, cfg);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "step failure at t = " << m * tau << ": " << e.what();
      throw NumericalError(msg.str());
    }
  }
  return traj;
}

}  // namespace wed
