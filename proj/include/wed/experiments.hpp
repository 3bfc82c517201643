#pragma once

#include "wed/optimizer.hpp"
#include "wed/reference.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wed {

/// Errors are discrete L2(0,T;H) norms sqrt(sum_{m=1..M} tau |delta_m|_H^2)
/// and final-time H norms.
struct SweepRow {
  double epsilon = 0.0;
  double lambda = 0.0;
  double err_L2H = 0.0;
  double err_final = 0.0;
  double el_residual = 0.0;
  double terminal_xi = 0.0;
  /// phi_lambda(u0) - sum tau (xi, rate) - phi_lambda(u_M); nonnegative when
  /// the a priori estimate holds.
  double energy_slack = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  /// Distance to the previous row's minimizer (lambda sweeps); 0 on row one.
  double cauchy_L2H = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  bool failed = false;
  std::string message;
  std::optional<Trajectory> minimizer;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(err_L2H) against log(epsilon), if defined.
  std::optional<double> slope;
  /// Target trajectory (causal sweeps) or lambda = 0 minimizer (lambda sweeps
  /// with smooth beta).
  std::optional<Trajectory> reference;
};

struct SweepOptions {
  /// Concurrent solves for cold-started rows.
  int workers = 1;
  /// Start each row from the previous row's minimizer (forces sequential runs).
  bool warm_start = true;
  StepperConfig stepper;
  /// Keep minimizers in the rows.
  bool keep_minimizers = false;
};

double l2h_distance(const Trajectory& a, const Trajectory& b, const SpatialGrid& grid);
double final_distance(const Trajectory& a, const Trajectory& b, const SpatialGrid& grid);

/// u(t) = cos(t) u0 + sin(t) s2 / 2 with s2 the second sine mode; smooth in
/// time and pinned at u0.
Trajectory smooth_sample_trajectory(const ProblemInstance& inst, int steps);

/// Minimizes the WED functional for each epsilon (strictly descending) and
/// compares against the time-stepping solution on the same grid. A failed
/// solve produces a flagged row; the sweep continues.
SweepTable causal_sweep(const ProblemInstance& inst, const std::vector<double>& epsilons, double lambda,
                        const OptimizeConfig& opt, const SweepOptions& options = {});
SweepTable causal_sweep(const ProblemInstance& inst, const Trajectory& reference, const std::vector<double>& epsilons,
                        double lambda, const OptimizeConfig& opt, const SweepOptions& options = {});

/// Minimizes for each lambda (strictly descending, >= 0) at fixed epsilon.
/// err_* measure the distance to the lambda = 0 minimizer when beta is smooth,
/// otherwise to the previous row's minimizer.
SweepTable lambda_sweep(const ProblemInstance& inst, double epsilon, const std::vector<double>& lambdas,
                        const OptimizeConfig& opt, const SweepOptions& options = {});

struct InequalityRecord {
  std::string name;
  std::string constant_name;
  int sample_count = 0;
  double worst_ratio = 0.0;
  double constant_used = 0.0;
  bool pass = true;
  /// Sample tuple attaining the worst ratio when the check fails.
  std::vector<Vector> witness;
};

struct AssumptionConstants {
  double kernel_norm = 0.0;
  double c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
  double c10 = 0.0, c11 = 0.0, c12 = 0.0, c13 = 0.0;
};

/// Closed-form constants for psi(u, v) = (g(k*u) v, v)/2 on the ball |u|_H <= R.
AssumptionConstants assumption_constants(const ProblemInstance& inst, double R);

struct AssumptionReport {
  double R = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  AssumptionConstants constants;
  /// Inequalities on psi.
  std::vector<InequalityRecord> records;
  /// Growth and coercivity of beta, sampled on |r| <= R / sqrt(h).
  std::vector<InequalityRecord> potential_records;
  bool dissipation_pass = true;
  bool potential_pass = true;
};

inline constexpr double kRatioSlack = 1e-9;

/// Samples (u, v, w, u1, u2, v1, v2) with H norms at most R and evaluates every
/// inequality as stated. Failures are data; nothing is thrown for them.
AssumptionReport verify_assumptions(const ProblemInstance& inst, double R, int samples, std::uint64_t seed);

}  // namespace wed
