#pragma once

#include "wed/experiments.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wed {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);

/// Header row of x-coordinates, then one row per time node.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, const SpatialGrid& grid);
Trajectory read_trajectory_csv(const std::string& path, double horizon);

using ReportEntries = std::vector<std::pair<std::string, std::string>>;
/// `key = value` lines in the given order.
void write_report(const std::string& path, const ReportEntries& entries);

/// Columns m, t, residual_H_norm, xi_H_norm for m = 1..M.
void write_el_csv(const std::string& path, const ElResidual& el, double tau);

inline constexpr const char* kSweepHeader =
    "epsilon,lambda,err_L2H,err_final,el_residual,terminal_xi,energy_slack,iterations,wall_time_s";
/// Sweep rows under kSweepHeader. wall_time_s is written as 0 unless
/// `with_timing` is set, so identical runs give identical files.
std::string sweep_csv(const SweepTable& table, bool with_timing);
void write_sweep_csv(const std::string& path, const SweepTable& table, bool with_timing);

ReportEntries solve_report_entries(const SolveReport& rep, const WedConfig& cfg);
ReportEntries sweep_summary_entries(const SweepTable& table);
ReportEntries assumption_report_entries(const AssumptionReport& rep);

}  // namespace wed
