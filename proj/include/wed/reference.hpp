#pragma once

#include "wed/grid.hpp"
#include "wed/problem.hpp"

namespace wed {

enum class CoefficientEvaluation { lagged, implicit };

struct StepperConfig {
  int steps = 64;
  double newton_tol = 1e-12;
  int newton_max = 50;
  CoefficientEvaluation g_evaluation = CoefficientEvaluation::lagged;

  void validate() const;
};

/// Backward Euler step of g(k*u) u_t - u_xx + beta(u) = 0:
///   G (u - u_prev)/tau + A u + b(u) = 0,
/// G = diag g(k * u_prev) (lagged) or diag g(k * u) (implicit). For smooth beta
/// b = beta; otherwise b is the Yosida approximation of beta at level tau.
Vector step(const Vector& u_prev, double tau, const ProblemInstance& inst, const StepperConfig& cfg);

/// u_0 = u0 followed by cfg.steps backward Euler steps over [0, T].
Trajectory solve_flow(const ProblemInstance& inst, const StepperConfig& cfg);

}  // namespace wed
