#include "../oracles.hpp"
#include "../support.hpp"

#include "cli.hpp"
#include "wed/io.hpp"
#include "wed/moreau_yosida.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wed;
using testing_support::builtin;
using testing_support::instance;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << detail << std::endl;
  if (!pass) ++failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

bool criterion_1() {
  const ProblemInstance inst = instance("instance.N = 8\ninstance.M = 16\ninstance.beta.name = linear(1)\n");
  OptimizeConfig opt;
  opt.g_tol = 1e-12;
  const SolveReport rep = minimize(inst, WedConfig{0.25, 0.0, 16}, opt);
  const RowMatrix exact = oracle::quadratic_minimizer(inst.u0, inst.grid.spacing(), 16, 1.0, 0.25, 1.0);
  double worst = 0.0;
  for (int m = 0; m <= 16; ++m)
    worst = std::max(worst, inst.grid.norm((rep.minimizer.states().row(m) - exact.row(m)).transpose().eval()));
  report(1, worst <= 1e-8, "quadratic minimizer vs normal equations, max node error " + fmt(worst));
  return true;
}

void criterion_2() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (const char* g : {"unit", "quadratic", "rational"}) {
    for (const char* beta : {"zero", "linear(1)", "linear_plus_sign(1, 0.5)"}) {
      const ProblemInstance inst = instance(std::string("instance.N = 8\ninstance.M = 8\ninstance.alpha = 0.5\n") +
                                            "instance.kernel.name = gaussian(0.2)\ninstance.g.name = " + g +
                                            "\ninstance.beta.name = " + beta + "\n");
      const WedConfig cfg{0.3, inst.potential.smooth ? 0.0 : 0.05, 8};
      for (int s = 0; s < 20; ++s) {
        const Trajectory t = testing_support::random_trajectory(inst, 8, rng);
        const RowMatrix grad = wed_gradient(t, inst, cfg).bottomRows(8);
        RowMatrix inner = t.states().bottomRows(8);
        const Vector x = Eigen::Map<const Vector>(inner.data(), inner.size());
        const Vector fd = oracle::central_gradient(
                              [&](const Vector& y) {
                                Trajectory p = t;
                                p.states().bottomRows(8) = Eigen::Map<const RowMatrix>(y.data(), 8, 8);
                                return wed_value(p, inst, cfg).total;
                              },
                              x, 1e-6) /
                          inst.grid.spacing();
        const Vector an = Eigen::Map<const Vector>(grad.data(), grad.size());
        worst = std::max(worst, (an - fd).norm() / std::max(an.norm(), 1e-300));
      }
    }
  }
  report(2, worst <= 1e-6, "gradient vs central differences over 180 trajectories, worst relative error " + fmt(worst));
}

void criterion_3() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"heat", "kirchhoff"}) {
    const SweepTable t = causal_sweep(builtin(name), {0.5, 0.25, 0.125, 0.0625, 0.03125}, 0.0, OptimizeConfig{});
    bool dec = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i) dec = dec && t.rows[i].err_L2H < t.rows[i - 1].err_L2H;
    const double ratio = t.rows.back().err_L2H / t.rows.front().err_L2H;
    pass = pass && dec && ratio <= 0.1;
    detail += std::string(name) + " decreasing=" + (dec ? "yes" : "no") + " ratio=" + fmt(ratio) + " ";
  }
  report(3, pass, "causal sweeps: " + detail);
}

void criterion_4() {
  const ProblemInstance inst = builtin("kirchhoff");
  std::vector<double> xi, defect;
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    OptimizeConfig opt;
    opt.g_tol = tol;
    const SolveReport rep = minimize(inst, WedConfig{0.25, 0.0, inst.steps}, opt);
    xi.push_back(rep.el.terminal_xi_norm);
    defect.push_back(rep.el.terminal_defect_norm);
  }
  const bool pass = xi[1] < xi[0] && xi[2] < xi[1];
  report(4, pass,
         "terminal |xi_M| at g_tol 1e-4/1e-6/1e-8: " + fmt(xi[0]) + " " + fmt(xi[1]) + " " + fmt(xi[2]) +
             " (terminal defect " + fmt(defect[0]) + " " + fmt(defect[1]) + " " + fmt(defect[2]) + ")");
}

void criterion_5() {
  double worst = 1e300;
  bool pass = true;
  for (const std::string name : {"heat", "kirchhoff", "rational", "nonsmooth"}) {
    const ProblemInstance inst = builtin(name);
    const double lam = inst.potential.smooth ? 0.0 : 0.01;
    const SweepTable t = causal_sweep(inst, {0.5, 0.25, 0.125}, lam, OptimizeConfig{});
    const double floor = -1e-4 * (1 + phi(inst, inst.u0));
    for (const SweepRow& r : t.rows) {
      worst = std::min(worst, r.energy_slack);
      pass = pass && r.energy_slack >= floor;
    }
  }
  report(5, pass, "a priori energy estimate at sweep minimizers, smallest slack " + fmt(worst));
}

void criterion_6() {
  bool monotone = true;
  for (const std::string name : {"heat", "kirchhoff", "rational", "nonsmooth"}) {
    const ProblemInstance inst = builtin(name);
    StepperConfig cfg;
    cfg.steps = inst.steps;
    const Trajectory t = solve_flow(inst, cfg);
    for (int m = 1; m <= t.steps(); ++m) monotone = monotone && phi(inst, t.state(m)) <= phi(inst, t.state(m - 1));
  }
  const ProblemInstance heat = builtin("heat");
  StepperConfig cfg;
  cfg.steps = heat.steps;
  const Trajectory t = solve_flow(heat, cfg);
  const double mu = oracle::sine_eigenvalue(heat.grid.size(), 1);
  double worst = 0.0;
  for (int m = 0; m <= t.steps(); ++m)
    worst = std::max(worst, heat.grid.norm((t.state(m) - heat.u0 / std::pow(1 + t.tau() * mu, m)).eval()));
  report(6, monotone && worst <= 1e-10,
         std::string("reference energy nonincreasing=") + (monotone ? "yes" : "no") + ", heat recursion error " + fmt(worst));
}

void criterion_7() {
  bool pass = true;
  std::string detail;
  for (const char* g : {"unit", "quadratic", "rational"}) {
    const ProblemInstance inst = instance(std::string("instance.g.name = ") + g + "\ninstance.kernel.name = gaussian(0.1)\n");
    for (double R : {1.0, 2.0}) {
      const AssumptionReport rep = verify_assumptions(inst, R, 1000, 7);
      double worst = 0.0;
      for (const InequalityRecord& r : rep.records) worst = std::max(worst, r.worst_ratio);
      pass = pass && rep.dissipation_pass;
      detail += std::string(g) + "/R=" + fmt(R) + " worst=" + fmt(worst) + " ";
    }
  }
  report(7, pass, "sampled structural inequalities: " + detail);
}

void criterion_8() {
  const ProblemInstance base = builtin("kirchhoff");
  double d[2];
  for (int level = 0; level < 2; ++level) {
    ProblemInstance inst = base;
    inst.steps = base.steps * (level + 1);
    d[level] = chain_rule_check(smooth_sample_trajectory(inst, inst.steps), inst, WedConfig{0.25, 0.0, inst.steps});
  }
  const double ratio = d[0] / d[1];
  report(8, ratio >= 1.7 && ratio <= 2.3, "chain-rule defect ratio M/2M = " + fmt(ratio));
}

void criterion_9() {
  const SpatialGrid g = SpatialGrid::unit_interval(16);
  const ConvexPotential beta = linear_plus_sign_potential(1.0, 0.5);
  std::mt19937_64 rng(9);
  double worst = 0.0;
  bool ordered = true;
  for (int s = 0; s < 200; ++s) {
    const Vector u = oracle::random_vector(rng, 16, 2.0);
    for (double lam : {1e-3, 1e-2, 1e-1}) {
      const Vector lhs = yosida_A(g, u, lam), rhs = apply_A(g, resolve_A(g, u, lam));
      worst = std::max(worst, g.norm((lhs - rhs).eval()) / std::max(g.norm(rhs), 1e-300));
      const double d = g.norm((u - resolve_phi2(beta, u, lam)).eval());
      const double p2 = phi2_lambda(beta, g, u, lam);
      ordered = ordered && phi1_lambda(g, u, lam) <= phi1(g, u) * (1 + 1e-12) && p2 <= phi2(beta, g, u) * (1 + 1e-12) &&
                d * d <= 2 * lam * p2 * (1 + 1e-12);
    }
  }
  report(9, worst <= 1e-9 && ordered,
         "Moreau-Yosida identities, resolvent identity error " + fmt(worst) + ", bounds hold=" + (ordered ? "yes" : "no"));
}

std::string cli_sweep(const fs::path& dir) {
  fs::remove_all(dir);
  const std::vector<std::string> args = {"wedtool", "causal-sweep", "--instance", "kirchhoff", "--output-dir",
                                         dir.string(), "--set", "instance.N=16", "--steps", "64", "--workers", "2"};
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) return "error: " + err.str();
  std::ifstream in(dir / "causal_sweep.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  const fs::path root = fs::temp_directory_path() / "wed_acceptance";
  const std::string a = cli_sweep(root / "a"), b = cli_sweep(root / "b");
  report(10, !a.empty() && a.rfind("error", 0) != 0 && a == b, "two CLI sweep runs give byte-identical CSV files");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
