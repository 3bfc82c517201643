#include "wed/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wed {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v(i));
  }
  return s;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const SpatialGrid& grid) {
  if (traj.nodes() != grid.size()) throw ConfigError("trajectory does not live on the grid");
  std::ofstream out = open_out(path);
  out << join(grid.nodes()) << '\n';
  for (int m = 0; m <= traj.steps(); ++m) out << join(traj.state(m)) << '\n';
}

Trajectory read_trajectory_csv(const std::string& path, double horizon) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("malformed value '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ConfigError(path + " holds fewer than two time nodes");
  RowMatrix states(rows.size(), rows.front().size());
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (std::size_t i = 0; i < rows[m].size(); ++i) states(m, i) = rows[m][i];
  return Trajectory(std::move(states), horizon);
}

void write_report(const std::string& path, const ReportEntries& entries) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
}

void write_el_csv(const std::string& path, const ElResidual& el, double tau) {
  std::ofstream out = open_out(path);
  out << "m,t,residual_H_norm,xi_H_norm\n";
  for (Eigen::Index m = 1; m < el.residual_norm.size(); ++m)
    out << m << ',' << format_double(m * tau) << ',' << format_double(el.residual_norm(m)) << ','
        << format_double(el.xi_norm(m)) << '\n';
}

std::string sweep_csv(const SweepTable& table, bool with_timing) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const SweepRow& r : table.rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.lambda) << ',' << format_double(r.err_L2H) << ','
        << format_double(r.err_final) << ',' << format_double(r.el_residual) << ',' << format_double(r.terminal_xi)
        << ',' << format_double(r.energy_slack) << ',' << r.iterations << ','
        << format_double(with_timing ? r.wall_time : 0.0) << '\n';
  }
  return out.str();
}

void write_sweep_csv(const std::string& path, const SweepTable& table, bool with_timing) {
  std::ofstream out = open_out(path);
  out << sweep_csv(table, with_timing);
}

ReportEntries solve_report_entries(const SolveReport& rep, const WedConfig& cfg) {
  return {
      {"epsilon", format_double(cfg.epsilon)},
      {"lambda", format_double(cfg.lambda)},
      {"M", std::to_string(cfg.steps)},
      {"label", rep.label},
      {"converged", rep.converged ? "true" : "false"},
      {"value", format_double(rep.value.total)},
      {"value_dissipation", format_double(rep.value.dissipation_part)},
      {"value_phi1", format_double(rep.value.phi1_part)},
      {"value_phi2", format_double(rep.value.phi2_part)},
      {"grad_norm", format_double(rep.grad_norm)},
      {"iterations", std::to_string(rep.iterations)},
      {"sweeps", std::to_string(rep.sweeps)},
      {"windows", std::to_string(rep.windows)},
      {"el_residual_l2", format_double(rep.el.l2_norm)},
      {"el_residual_max", format_double(rep.el.max_norm)},
      {"terminal_xi_norm", format_double(rep.el.terminal_xi_norm)},
      {"terminal_defect_norm", format_double(rep.el.terminal_defect_norm)},
  };
}

ReportEntries sweep_summary_entries(const SweepTable& table) {
  ReportEntries e;
  e.emplace_back("error_norm", "sqrt(sum_{m=1..M} tau |u_m - v_m|_H^2)");
  e.emplace_back("rows", std::to_string(table.rows.size()));
  e.emplace_back("slope_log_err_vs_log_epsilon", table.slope ? format_double(*table.slope) : "undefined");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& r = table.rows[i];
    const std::string p = "row" + std::to_string(i) + ".";
    e.emplace_back(p + "failed", r.failed ? "true" : "false");
    e.emplace_back(p + "converged", r.converged ? "true" : "false");
    e.emplace_back(p + "grad_norm", format_double(r.grad_norm));
    e.emplace_back(p + "cauchy_L2H", format_double(r.cauchy_L2H));
    if (!r.message.empty()) e.emplace_back(p + "message", r.message);
  }
  return e;
}

ReportEntries assumption_report_entries(const AssumptionReport& rep) {
  const AssumptionConstants& c = rep.constants;
  ReportEntries e = {
      {"R", format_double(rep.R)},
      {"samples", std::to_string(rep.samples)},
      {"seed", std::to_string(rep.seed)},
      {"kernel_norm", format_double(c.kernel_norm)},
      {"c4", format_double(c.c4)},
      {"c5", format_double(c.c5)},
      {"c6", format_double(c.c6)},
      {"c7", format_double(c.c7)},
      {"c8", format_double(c.c8)},
      {"c9", format_double(c.c9)},
      {"c10", format_double(c.c10)},
      {"c11", format_double(c.c11)},
      {"c12", format_double(c.c12)},
      {"c13", format_double(c.c13)},
      {"dissipation_pass", rep.dissipation_pass ? "true" : "false"},
      {"potential_pass", rep.potential_pass ? "true" : "false"},
  };
  auto add = [&](const std::string& prefix, const std::vector<InequalityRecord>& records) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const InequalityRecord& r = records[i];
      const std::string p = prefix + std::to_string(i) + ".";
      e.emplace_back(p + "name", r.name);
      e.emplace_back(p + "constant", r.constant_name + " = " + format_double(r.constant_used));
      e.emplace_back(p + "sample_count", std::to_string(r.sample_count));
      e.emplace_back(p + "worst_ratio", format_double(r.worst_ratio));
      e.emplace_back(p + "pass", r.pass ? "true" : "false");
      for (std::size_t k = 0; k < r.witness.size(); ++k)
        e.emplace_back(p + "witness" + std::to_string(k), join(r.witness[k]));
    }
  };
  add("check", rep.records);
  add("potential", rep.potential_records);
  return e;
}

}  // namespace wed
