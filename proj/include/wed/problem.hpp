#pragma once

#include "wed/grid.hpp"
#include "wed/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wed {

using ScalarFn = std::function<double(double)>;

/// Dissipation coefficient g with its first two derivatives.
struct Coefficient {
  std::string name;
  ScalarFn value;
  ScalarFn first;
  ScalarFn second;
  /// sup_{|s| <= radius} |g^(order)(s)| for order 0, 1, 2. Built-ins supply a
  /// closed form; empty means dense sampling.
  std::function<double(int order, double radius)> sup_abs;

  double sup(int order, double radius) const;
};

Coefficient unit_coefficient();                  // g = 1
Coefficient quadratic_coefficient();             // g = 1 + s^2
Coefficient rational_coefficient(double alpha);  // g = alpha + 1/(1 + s^2)
/// Natural cubic spline through (s_j, g_j), extended linearly outside the table
/// so the result stays C^2.
Coefficient tabulated_coefficient(std::vector<double> s, std::vector<double> g);

/// g(k * u) data: coefficient, its positive lower bound and the convolution
/// kernel sampled on offsets -(N-1)..(N-1) (index offset + N - 1).
class DissipationModel {
 public:
  DissipationModel(Coefficient coefficient, double alpha, Vector kernel);

  const Coefficient& coefficient() const { return coefficient_; }
  double alpha() const { return alpha_; }
  const Vector& kernel() const { return kernel_; }

  double g(double s) const { return coefficient_.value(s); }
  double dg(double s) const { return coefficient_.first(s); }
  double d2g(double s) const { return coefficient_.second(s); }

  /// Discrete L2 norm sqrt(h * sum k^2) over all stored offsets.
  double kernel_norm(double h) const;

  /// Spot check g >= alpha on a fixed sample set; throws ConfigError.
  void check_lower_bound() const;

 private:
  Coefficient coefficient_;
  double alpha_;
  Vector kernel_;
};

Vector zero_kernel(const SpatialGrid& grid);
/// 1/h at offset 0: the discrete identity.
Vector delta_kernel(const SpatialGrid& grid);
/// Unit-mass Gaussian exp(-x^2/(2 sigma^2)) / (sqrt(2 pi) sigma).
Vector gaussian_kernel(const SpatialGrid& grid, double sigma);
Vector reflect_kernel(const Vector& kernel);

enum class Selection { none, lower, upper, midpoint };

/// beta = d(beta_hat) as a maximal monotone graph [lower(r), upper(r)]; the two
/// bounds differ only at isolated jump points.
struct ConvexPotential {
  std::string name;
  ScalarFn energy;
  ScalarFn lower;
  ScalarFn upper;
  /// beta' away from jumps.
  ScalarFn slope;
  /// |beta(r)| <= growth (1 + |r|).
  double growth = 0.0;
  /// r beta(r) >= r^2/c - c with this c, if such a constant exists.
  std::optional<double> coercivity;
  bool smooth = true;
  Selection selection = Selection::none;
  /// Points where beta is set-valued.
  std::vector<double> jumps;

  bool set_valued_at(double r) const { return lower(r) != upper(r); }
  /// Single-valued beta(r); throws ConfigError at a jump without selection.
  double select(double r) const;
};

ConvexPotential zero_potential();
ConvexPotential linear_potential(double a);
/// beta(r) = a r + b sign(r), beta_hat(r) = a r^2/2 + b |r|.
ConvexPotential linear_plus_sign_potential(double a, double b, Selection selection = Selection::midpoint);

struct ProblemInstance {
  std::string name;
  SpatialGrid grid;
  DissipationModel dissipation;
  ConvexPotential potential;
  Vector u0;
  double horizon = 1.0;
  /// Default number of time steps for both the WED functional and the stepper.
  int steps = 64;

  void validate() const;
};

Vector sine_mode(const SpatialGrid& grid, int k);
/// Smooth bump supported in (1/4, 3/4) of the unit interval, peak 1.
Vector bump_profile(const SpatialGrid& grid);

// Pointwise quantities. All vectors live on inst.grid; representers are taken
// with respect to the h-weighted inner product.

/// w_i = h sum_j kernel[i - j] u_j with zero extension outside the grid.
Vector convolve(const Vector& kernel, const SpatialGrid& grid, const Vector& u);

double psi(const ProblemInstance& inst, const Vector& u, const Vector& v);
Vector d2_psi(const ProblemInstance& inst, const Vector& u, const Vector& v);
Vector d1_psi(const ProblemInstance& inst, const Vector& u, const Vector& v);
/// Derivative of d2_psi(u, v) in u along w: g'(k*u) (k*w) v.
Vector d21_psi_apply(const ProblemInstance& inst, const Vector& u, const Vector& v, const Vector& w);
/// Derivative of d2_psi(u, v) in v along w: g(k*u) w.
Vector d22_psi_apply(const ProblemInstance& inst, const Vector& u, const Vector& v, const Vector& w);

/// Three-point stencil of -u'' with zero Dirichlet neighbours.
Vector apply_A(const SpatialGrid& grid, const Vector& u);
double phi1(const SpatialGrid& grid, const Vector& u);
double phi2(const ConvexPotential& potential, const SpatialGrid& grid, const Vector& u);
double phi(const ProblemInstance& inst, const Vector& u);
Vector eval_beta(const ConvexPotential& potential, const Vector& u);

/// Values shared by psi and its derivatives at a fixed state u.
struct CoefficientField {
  Vector conv;  // k * u
  Vector g;
  Vector dg;
};
CoefficientField coefficient_field(const ProblemInstance& inst, const Vector& u);

}  // namespace wed
