#pragma once

#include "wed/grid.hpp"
#include "wed/moreau_yosida.hpp"
#include "wed/problem.hpp"

namespace wed {

enum class Quadrature { right_endpoint };

/// Discretization of the weighted energy-dissipation functional: backward
/// difference rates and right-endpoint quadrature with node weights
/// tau * exp(-t_m / epsilon).
struct WedConfig {
  double epsilon = 0.25;
  double lambda = 0.0;
  int steps = 64;
  Quadrature quadrature = Quadrature::right_endpoint;

  void validate() const;
  double weight(double t) const { return std::exp(-t / epsilon); }
};

struct WedBreakdown {
  double total = 0.0;
  double dissipation_part = 0.0;
  double phi1_part = 0.0;
  double phi2_part = 0.0;
};

/// Euler-Lagrange fields per time node (row m, rows 1..M populated) and their
/// norms. Norms over time are discrete L2(0,T;H): sqrt(sum_m tau |.|_H^2).
struct ElResidual {
  RowMatrix xi;
  RowMatrix gamma;
  RowMatrix eta1;
  RowMatrix eta2;
  RowMatrix residual;
  Vector residual_norm;  // |residual_m|_H
  Vector xi_norm;        // |xi_m|_H
  double max_norm = 0.0;
  double l2_norm = 0.0;
  /// |xi_M|_H.
  double terminal_xi_norm = 0.0;
  /// |eps xi_M + tau (eps J gamma_M + eta1_M + eta2_M)|_H: the natural
  /// condition of the discrete functional at the final node.
  double terminal_defect_norm = 0.0;
};

/// Evaluation context for one (instance, config) pair. Holds the resolvent
/// factorization; safe for concurrent const use.
class WedEvaluator {
 public:
  WedEvaluator(const ProblemInstance& inst, const WedConfig& cfg);

  const ProblemInstance& instance() const { return inst_; }
  const WedConfig& config() const { return cfg_; }
  const ResolventA& resolvent() const { return resolvent_; }

  void check_admissible(const Trajectory& traj) const;

  WedBreakdown value(const Trajectory& traj) const;

  /// Sum over m = first..min(last + 1, M) of exp(-(t_m - t_first)/eps) tau
  /// [eps psi + phi1_lambda + phi2_lambda]: every term that depends on states
  /// first..last, rescaled by exp(t_first/eps). If `normalized` is non-null it
  /// receives the gradient with respect to states first..last divided by the
  /// node weight tau exp(-t_m/eps) (one row per node).
  double window(const Trajectory& traj, int first, int last, RowMatrix* normalized) const;

  /// Gradient of the value divided by the node weight, rows 1..M (row 0 zero).
  RowMatrix normalized_gradient(const Trajectory& traj) const;

  ElResidual el_residual(const Trajectory& traj) const;

 private:
  struct NodeTerms {
    double psi = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    Vector xi, gamma, eta1, eta2;
  };
  NodeTerms node(const Trajectory& traj, int m, bool with_gradient) const;
  void check_finite(double value, int m, const char* what) const;

  const ProblemInstance& inst_;
  WedConfig cfg_;
  ResolventA resolvent_;
  Vector reflected_kernel_;
};

WedBreakdown wed_value(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

/// Gradient of the total with respect to u_m under the h-weighted inner
/// product, rows 1..M; row 0 (the pinned datum) is zero.
RowMatrix wed_gradient(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

ElResidual el_residual(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

/// wed_value plus sum_m tau exp(-t_m/eps) |u_m - anchor_m|_H^2 / 2.
double wed_penalized_value(const Trajectory& traj, const Trajectory& anchor, const ProblemInstance& inst,
                           const WedConfig& cfg);

/// Largest |d/dt psi(J u, u') - (xi, u'') - (gamma, J u')| over interior time
/// nodes, with the time derivative of psi taken as a forward difference.
double chain_rule_check(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

/// sum_m tau (xi_m, rate_m)_H + phi_lambda(u_M) - phi_lambda(u_0). The a priori
/// estimate says this is <= 0 at minimizers.
double energy_estimate_excess(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

}  // namespace wed
