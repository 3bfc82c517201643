#pragma once

#include "wed/types.hpp"

namespace wed {

/// Uniform grid of interior nodes x_i = i*h, i = 1..n, on (0, (n+1)h) with
/// homogeneous Dirichlet ends. Boundary values are never stored.
class SpatialGrid {
 public:
  SpatialGrid(int n, double h);

  /// Grid on the unit interval: h = 1/(n+1).
  static SpatialGrid unit_interval(int n);

  int size() const { return n_; }
  double spacing() const { return h_; }
  double domain_length() const { return (n_ + 1) * h_; }
  double node(int i) const { return (i + 1) * h_; }
  Vector nodes() const;

  /// h-weighted inner product approximating the L2 integral.
  template <typename A, typename B>
  double inner(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) const {
    return h_ * u.dot(v);
  }
  template <typename A>
  double norm(const Eigen::MatrixBase<A>& u) const {
    return std::sqrt(h_ * u.squaredNorm());
  }

  void check_state(const Vector& u, const char* what) const;

  bool operator==(const SpatialGrid& other) const = default;

 private:
  int n_;
  double h_;
};

/// States u_0..u_M on a uniform time grid t_m = m*tau, tau = T/M. Row m is the
/// state at t_m. Admissibility (row 0 equal to the initial datum) is checked by
/// the consumers that know the datum.
class Trajectory {
 public:
  Trajectory(RowMatrix states, double horizon);

  /// u_m = u0 for every m.
  static Trajectory constant(const Vector& u0, int steps, double horizon);

  int steps() const { return static_cast<int>(states_.rows()) - 1; }
  int nodes() const { return static_cast<int>(states_.cols()); }
  double horizon() const { return horizon_; }
  double tau() const { return horizon_ / steps(); }
  double time(int m) const { return m * tau(); }

  auto state(int m) const { return states_.row(m).transpose(); }
  auto state(int m) { return states_.row(m).transpose(); }

  /// Backward difference (u_m - u_{m-1})/tau, m >= 1.
  Vector rate(int m) const { return (states_.row(m) - states_.row(m - 1)).transpose() / tau(); }

  const RowMatrix& states() const { return states_; }
  RowMatrix& states() { return states_; }

 private:
  RowMatrix states_;
  double horizon_;
};

}  // namespace wed
