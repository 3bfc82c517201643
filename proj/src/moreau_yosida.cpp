#include "wed/moreau_yosida.hpp"

#include <cmath>
#include <sstream>

namespace wed {

namespace {

constexpr double kScalarTol = 1e-12;
constexpr int kNewtonMax = 60;
constexpr int kMaxDoublings = 100;

}  // namespace

RegularizationLevel::RegularizationLevel(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("regularization level lambda must be >= 0");
}

ResolventA::ResolventA(const SpatialGrid& grid, RegularizationLevel level) : grid_(grid), lambda_(level.value()) {
  if (!level.active()) return;
  const int n = grid.size();
  const double c = lambda_ / (grid.spacing() * grid.spacing());
  factor_.emplace(Vector::Constant(n, 1.0 + 2.0 * c), Vector::Constant(n - 1, -c));
}

Vector ResolventA::apply(const Vector& u) const {
  grid_.check_state(u, "resolve_A");
  if (!factor_) return u;
  Vector w = factor_->solve(u);
  const double residual = (factor_->apply(w) - u).norm();
  if (residual > 1e-10 * std::max(u.norm(), std::numeric_limits<double>::min())) {
    std::ostringstream msg;
    msg << "resolvent solve residual " << residual << " exceeds tolerance";
    throw NumericalError(msg.str());
  }
  return w;
}

Vector ResolventA::yosida(const Vector& u) const {
  if (!factor_) throw ConfigError("Yosida approximation needs lambda > 0; use apply_A directly");
  return (u - apply(u)) / lambda_;
}

Vector resolve_A(const SpatialGrid& grid, const Vector& u, double lambda) {
  return ResolventA(grid, RegularizationLevel(lambda)).apply(u);
}

Vector yosida_A(const SpatialGrid& grid, const Vector& u, double lambda) {
  return ResolventA(grid, RegularizationLevel(lambda)).yosida(u);
}

double resolve_beta(const ConvexPotential& potential, double s, double lambda) {
  RegularizationLevel level(lambda);
  if (!level.active()) return s;
  // F(r) = r + lambda beta(r) - s over the graph: below the root F_upper < 0,
  // above it F_lower > 0.
  auto f_lower = [&](double r) { return r + lambda * potential.lower(r) - s; };
  auto f_upper = [&](double r) { return r + lambda * potential.upper(r) - s; };
  for (double j : potential.jumps)
    if (f_lower(j) <= 0.0 && f_upper(j) >= 0.0) return j;

  double width = 1.0 + std::abs(s);
  double lo = s - width;
  int doublings = 0;
  while (f_upper(lo) > 0.0) {
    if (++doublings > kMaxDoublings) throw NumericalError("resolvent bracket failure");
    width *= 2.0;
    lo = s - width;
  }
  width = 1.0 + std::abs(s);
  double hi = s + width;
  doublings = 0;
  while (f_lower(hi) < 0.0) {
    if (++doublings > kMaxDoublings) throw NumericalError("resolvent bracket failure");
    width *= 2.0;
    hi = s + width;
  }

  double r = std::clamp(s, lo, hi);
  for (int it = 0; it < kNewtonMax; ++it) {
    const double fl = f_lower(r);
    const double fu = f_upper(r);
    if (fl <= 0.0 && fu >= 0.0) return r;
    if (fu < 0.0) lo = r;
    else hi = r;
    const double tol = kScalarTol * std::max(1.0, std::abs(r));
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double residual = fu < 0.0 ? fu : fl;
    const double step = residual / (1.0 + lambda * potential.slope(r));
    double next = r - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= tol) return next;
    r = next;
  }
  while (hi - lo > kScalarTol * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (f_upper(mid) < 0.0) lo = mid;
    else if (f_lower(mid) > 0.0) hi = mid;
    else return mid;
  }
  return 0.5 * (lo + hi);
}

double resolve_beta_derivative(const ConvexPotential& potential, double s, double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  const double r = resolve_beta(potential, s, lambda);
  if (potential.set_valued_at(r)) return 0.0;
  return 1.0 / (1.0 + lambda * potential.slope(r));
}

Vector resolve_phi2(const ConvexPotential& potential, const Vector& u, double lambda) {
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = resolve_beta(potential, u(i), lambda);
  return out;
}

double phi1_lambda(const SpatialGrid& grid, const Vector& u, double lambda) {
  if (!RegularizationLevel(lambda).active()) return phi1(grid, u);
  const Vector ju = resolve_A(grid, u, lambda);
  return 0.5 / lambda * grid.norm(u - ju) * grid.norm(u - ju) + phi1(grid, ju);
}

double phi2_lambda(const ConvexPotential& potential, const SpatialGrid& grid, const Vector& u, double lambda) {
  if (!RegularizationLevel(lambda).active()) return phi2(potential, grid, u);
  grid.check_state(u, "phi2_lambda");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = resolve_beta(potential, u(i), lambda);
    acc += 0.5 / lambda * (u(i) - r) * (u(i) - r) + potential.energy(r);
  }
  return grid.spacing() * acc;
}

Vector d_phi2_lambda(const ConvexPotential& potential, const Vector& u, double lambda) {
  if (!RegularizationLevel(lambda).active()) return eval_beta(potential, u);
  return (u - resolve_phi2(potential, u, lambda)) / lambda;
}

}  // namespace wed
