#pragma once

#include "wed/functional.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wed {

enum class Method { gradient_descent_armijo, limited_memory_quasi_newton };

struct ArmijoParameters {
  double c = 1e-4;
  double backtrack = 0.5;
};

struct OptimizeConfig {
  Method method = Method::limited_memory_quasi_newton;
  /// Tolerance on the discrete L2(0,T;H) norm of the weight-normalized gradient.
  double g_tol = 1e-8;
  int max_iters = 50000;
  ArmijoParameters armijo;
  int memory = 10;
  std::uint64_t seed = 0;
  /// Length of the time windows for block minimization, in units of epsilon.
  /// Zero (or a window covering [0, T]) minimizes over all nodes at once.
  double window_span = 6.0;

  void validate() const;
};

/// Smooth objective over a flat vector with a diagonal inner product
/// <p, q> = sum_i metric_i p_i q_i. evaluate() returns f and writes the
/// gradient with respect to that inner product.
struct SmoothObjective {
  std::function<double(const Vector& x, Vector& gradient)> evaluate;
  Vector metric;
  /// Weights of the norm used for the stopping test.
  Vector norm_weights;
};

struct SmoothResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective value after every accepted step, starting with the initial one.
  std::vector<double> values;
};

/// Backtracking line search along gradient-descent (Barzilai-Borwein initial
/// step) or L-BFGS directions. A step is accepted on the Armijo test; when the
/// value change drops to rounding level the decrease is measured by the
/// trapezoid rule on the directional derivative instead.
SmoothResult minimize_smooth(const SmoothObjective& objective, Vector x0, const OptimizeConfig& opt);

class StalledLineSearch : public NumericalError {
 public:
  StalledLineSearch(const std::string& what, Vector last) : NumericalError(what), last_iterate(std::move(last)) {}
  Vector last_iterate;
};

struct SolveReport {
  Trajectory minimizer;
  WedBreakdown value;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  ElResidual el;
  double wall_time = 0.0;
  int sweeps = 0;
  int windows = 1;
  /// Functional value after each accepted step (single window) or after each
  /// window solve (block minimization).
  std::vector<double> value_history;
  std::string label = "stationary point; global minimizer candidate";
};

/// Stalled line search inside minimize(); carries the last trajectory.
class StalledSolve : public NumericalError {
 public:
  StalledSolve(const std::string& what, Trajectory last) : NumericalError(what), last_iterate(std::move(last)) {}
  Trajectory last_iterate;
};

/// Minimizes the discrete WED functional over trajectories with u_0 pinned.
/// Without `init` the constant trajectory u_m = u0 is used.
SolveReport minimize(const ProblemInstance& inst, const WedConfig& cfg, const OptimizeConfig& opt,
                     std::optional<Trajectory> init = std::nullopt);

/// Solves each configuration in order, warm-starting from the previous
/// minimizer. Configurations must share the time discretization.
std::vector<SolveReport> continuation_minimize(const ProblemInstance& inst, const std::vector<WedConfig>& cfgs,
                                               const OptimizeConfig& opt);

/// Discrete L2(0,T;H) norm of the weight-normalized gradient.
double normalized_gradient_norm(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg);

}  // namespace wed
