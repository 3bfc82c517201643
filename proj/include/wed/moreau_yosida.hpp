#pragma once

#include "wed/grid.hpp"
#include "wed/problem.hpp"
#include "wed/tridiagonal.hpp"

#include <optional>

namespace wed {

/// Moreau-Yosida level. Zero means no regularization: resolvents are identities
/// and the regularized energies reduce to the plain ones.
class RegularizationLevel {
 public:
  explicit RegularizationLevel(double lambda);
  double value() const { return lambda_; }
  bool active() const { return lambda_ > 0.0; }

 private:
  double lambda_;
};

/// Factorization of I + lambda A_h for one grid and level; J_lambda u is a
/// single tridiagonal solve. Read-only after construction.
class ResolventA {
 public:
  ResolventA(const SpatialGrid& grid, RegularizationLevel level);

  Vector apply(const Vector& u) const;
  /// (u - J u)/lambda; requires lambda > 0.
  Vector yosida(const Vector& u) const;
  double lambda() const { return lambda_; }

 private:
  SpatialGrid grid_;
  double lambda_;
  std::optional<SymmetricTridiagonal<double>> factor_;
};

Vector resolve_A(const SpatialGrid& grid, const Vector& u, double lambda);
Vector yosida_A(const SpatialGrid& grid, const Vector& u, double lambda);

/// Unique r with s in r + lambda beta(r), beta taken as its monotone graph.
double resolve_beta(const ConvexPotential& potential, double s, double lambda);
/// d(resolve_beta)/ds: 1/(1 + lambda beta'(r)), zero when r sits on a jump.
double resolve_beta_derivative(const ConvexPotential& potential, double s, double lambda);
Vector resolve_phi2(const ConvexPotential& potential, const Vector& u, double lambda);

double phi1_lambda(const SpatialGrid& grid, const Vector& u, double lambda);
double phi2_lambda(const ConvexPotential& potential, const SpatialGrid& grid, const Vector& u, double lambda);
/// Gradient of phi2_lambda, (u - I_lambda u)/lambda; for lambda = 0 the
/// configured selection of beta.
Vector d_phi2_lambda(const ConvexPotential& potential, const Vector& u, double lambda);

}  // namespace wed
