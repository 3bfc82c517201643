#include "cli.hpp"

#include "wed/config.hpp"
#include "wed/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace wed::cli {

namespace {

namespace fs = std::filesystem;

struct Manifest {
  std::string command;
  std::string instance = "heat";
  std::string output_dir = ".";
  std::vector<std::string> overrides;
  std::optional<double> epsilon, lambda, R, g_tol;
  std::optional<int> samples, workers, steps;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

// Config file, then --set pairs, then the dedicated numeric flags.
Config resolve_config(const Manifest& m) {
  Config cfg = Config::resolve(m.instance);
  for (const std::string& kv : m.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (m.epsilon) cfg.set("wed.epsilon", format_double(*m.epsilon));
  if (m.lambda) cfg.set("wed.lambda", format_double(*m.lambda));
  if (m.R) cfg.set("verify.R", format_double(*m.R));
  if (m.samples) cfg.set("verify.samples", std::to_string(*m.samples));
  if (m.seed) {
    cfg.set("verify.seed", std::to_string(*m.seed));
    cfg.set("opt.seed", std::to_string(*m.seed));
  }
  if (m.workers) cfg.set("sweep.workers", std::to_string(*m.workers));
  if (m.g_tol) cfg.set("opt.g_tol", format_double(*m.g_tol));
  if (m.steps) cfg.set("instance.M", std::to_string(*m.steps));
  return cfg;
}

class Session {
 public:
  Session(const Manifest& m, std::ostream& out)
      : manifest_(m), out_(out), cfg_(resolve_config(m)), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(m.output_dir, ec);
    if (ec || !fs::is_directory(m.output_dir)) throw ConfigError("output directory '" + m.output_dir + "' is not usable");
    const fs::path probe = fs::path(m.output_dir) / ".write_probe";
    if (!std::ofstream(probe)) throw ConfigError("output directory '" + m.output_dir + "' is not writable");
    fs::remove(probe, ec);
  }

  const Config& config() const { return cfg_; }
  std::ostream& out() { return out_; }
  std::string path(const std::string& name) const { return (fs::path(manifest_.output_dir) / name).string(); }
  bool timing() const { return manifest_.timing; }

  void timed(const std::string& key, double seconds) { timings_.emplace_back(key, format_double(seconds)); }

  void write_metadata() const {
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    ReportEntries e = {{"command", manifest_.command},
                       {"instance", manifest_.instance},
                       {"timestamp", stamp},
                       {"wall_time_s", format_double(std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count())}};
    e.insert(e.end(), timings_.begin(), timings_.end());
    for (const auto& [k, v] : cfg_.values()) e.emplace_back("config." + k, v);
    write_report(path("run_metadata.txt"), e);
  }

 private:
  Manifest manifest_;
  std::ostream& out_;
  Config cfg_;
  std::chrono::steady_clock::time_point start_;
  ReportEntries timings_;
};

double energy(const ProblemInstance& inst, const Vector& u) { return phi(inst, u); }

Trajectory reference_run(Session& s, const ProblemInstance& inst) {
  const Trajectory ref = solve_flow(inst, stepper_config(s.config(), inst));
  write_trajectory_csv(s.path("reference.csv"), ref, inst.grid);
  return ref;
}

void cmd_minimize(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const WedConfig cfg = wed_config(s.config(), inst);
  try {
    const SolveReport rep = minimize(inst, cfg, optimize_config(s.config()));
    write_trajectory_csv(s.path("minimizer.csv"), rep.minimizer, inst.grid);
    write_el_csv(s.path("el_residual.csv"), rep.el, rep.minimizer.tau());
    ReportEntries e = solve_report_entries(rep, cfg);
    e.emplace_back("energy_estimate_excess", format_double(energy_estimate_excess(rep.minimizer, inst, cfg)));
    write_report(s.path("solve_report.txt"), e);
    s.timed("solve_wall_time_s", rep.wall_time);
    s.out() << "value = " << format_double(rep.value.total) << "\ngrad_norm = " << format_double(rep.grad_norm)
            << "\nconverged = " << (rep.converged ? "true" : "false") << '\n';
  } catch (const StalledSolve& e) {
    write_trajectory_csv(s.path("last_iterate.csv"), e.last_iterate, inst.grid);
    throw;
  }
}

void cmd_reference(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const Trajectory ref = reference_run(s, inst);
  bool monotone = true;
  double rate_sum = 0.0;
  for (int m = 1; m <= ref.steps(); ++m) {
    monotone = monotone && energy(inst, ref.state(m)) <= energy(inst, ref.state(m - 1));
    rate_sum += ref.tau() * inst.grid.inner(ref.rate(m), ref.rate(m));
  }
  write_report(s.path("reference_report.txt"),
               {{"M", std::to_string(ref.steps())},
                {"energy_initial", format_double(energy(inst, ref.state(0)))},
                {"energy_final", format_double(energy(inst, ref.state(ref.steps())))},
                {"energy_nonincreasing", monotone ? "true" : "false"},
                {"rate_l2_squared", format_double(rate_sum)}});
  s.out() << "energy_nonincreasing = " << (monotone ? "true" : "false") << '\n';
}

void write_sweep(Session& s, const SweepTable& table, const std::string& name) {
  write_sweep_csv(s.path(name + ".csv"), table, s.timing());
  write_report(s.path(name + "_summary.txt"), sweep_summary_entries(table));
  double total = 0.0;
  for (const SweepRow& r : table.rows) total += r.wall_time;
  s.timed(name + "_wall_time_s", total);
  s.out() << sweep_csv(table, s.timing());
}

void cmd_causal_sweep(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const WedConfig cfg = wed_config(s.config(), inst);
  const std::vector<double> eps = s.config().has("wed.epsilon") && !s.config().has("sweep.epsilons")
                                      ? std::vector<double>{cfg.epsilon}
                                      : s.config().get_list("sweep.epsilons", {0.5, 0.25, 0.125, 0.0625, 0.03125});
  const Trajectory ref = reference_run(s, inst);
  write_sweep(s, causal_sweep(inst, ref, eps, cfg.lambda, optimize_config(s.config()), sweep_options(s.config(), inst)),
              "causal_sweep");
}

void cmd_lambda_sweep(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const WedConfig cfg = wed_config(s.config(), inst);
  std::vector<double> fallback = {0.1, 0.01, 0.001};
  if (inst.potential.smooth) fallback.push_back(0.0);
  const std::vector<double> lambdas = s.config().get_list("sweep.lambdas", fallback);
  write_sweep(s, lambda_sweep(inst, cfg.epsilon, lambdas, optimize_config(s.config()), sweep_options(s.config(), inst)),
              "lambda_sweep");
}

void cmd_verify(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const AssumptionReport rep = verify_assumptions(inst, s.config().get_double("verify.R", 1.0),
                                                  s.config().get_int("verify.samples", 1000),
                                                  s.config().get_uint("verify.seed", 0));
  const ReportEntries e = assumption_report_entries(rep);
  write_report(s.path("assumptions.txt"), e);
  for (const auto& [k, v] : e)
    if (k.find("witness") == std::string::npos) s.out() << k << " = " << v << '\n';
}

void cmd_chain_check(Session& s) {
  ProblemInstance inst = build_instance(s.config());
  const WedConfig base = wed_config(s.config(), inst);
  double defect[2];
  for (int level = 0; level < 2; ++level) {
    ProblemInstance refined = inst;
    refined.steps = inst.steps * (level + 1);
    WedConfig cfg = base;
    cfg.steps = refined.steps;
    defect[level] = chain_rule_check(smooth_sample_trajectory(refined, refined.steps), refined, cfg);
  }
  const double ratio = defect[0] / defect[1];
  write_report(s.path("chain_check.txt"), {{"M", std::to_string(inst.steps)},
                                           {"defect_M", format_double(defect[0])},
                                           {"defect_2M", format_double(defect[1])},
                                           {"ratio", format_double(ratio)}});
  s.out() << "defect_M = " << format_double(defect[0]) << "\ndefect_2M = " << format_double(defect[1])
          << "\nratio = " << format_double(ratio) << '\n';
}

void cmd_compare(Session& s) {
  const ProblemInstance inst = build_instance(s.config());
  const WedConfig cfg = wed_config(s.config(), inst);
  const Trajectory ref = reference_run(s, inst);
  const SolveReport rep = minimize(inst, cfg, optimize_config(s.config()));
  write_trajectory_csv(s.path("minimizer.csv"), rep.minimizer, inst.grid);
  const double err = l2h_distance(rep.minimizer, ref, inst.grid);
  const double err_final = final_distance(rep.minimizer, ref, inst.grid);
  write_report(s.path("compare_report.txt"), {{"epsilon", format_double(cfg.epsilon)},
                                              {"lambda", format_double(cfg.lambda)},
                                              {"converged", rep.converged ? "true" : "false"},
                                              {"err_L2H", format_double(err)},
                                              {"err_final", format_double(err_final)}});
  s.out() << "err_L2H = " << format_double(err) << "\nerr_final = " << format_double(err_final) << '\n';
}

void add_common(CLI::App* sub, Manifest& m) {
  sub->add_option("--instance", m.instance, "Configuration file or built-in name (heat, kirchhoff, rational, nonsmooth)");
  sub->add_option("--output-dir", m.output_dir, "Directory for reports and CSV files");
  sub->add_option("--set", m.overrides, "Override a configuration key: key=value");
  sub->add_option("--epsilon", m.epsilon, "wed.epsilon");
  sub->add_option("--lambda", m.lambda, "wed.lambda");
  sub->add_option("--R", m.R, "verify.R");
  sub->add_option("--samples", m.samples, "verify.samples");
  sub->add_option("--seed", m.seed, "verify.seed and opt.seed");
  sub->add_option("--workers", m.workers, "sweep.workers");
  sub->add_option("--g-tol", m.g_tol, "opt.g_tol");
  sub->add_option("--steps", m.steps, "instance.M");
  sub->add_flag("--timing", m.timing, "Write wall times into sweep CSV files");
}

void write_diagnostics(const Manifest& m, const std::string& kind, const std::string& what) {
  std::error_code ec;
  fs::create_directories(m.output_dir, ec);
  std::ofstream out(fs::path(m.output_dir) / "diagnostics.txt");
  out << "command = " << m.command << "\ninstance = " << m.instance << "\nerror = " << kind << "\nmessage = " << what
      << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted energy-dissipation toolkit"};
  app.require_subcommand(1);
  Manifest m;
  using Handler = void (*)(Session&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"minimize", "Minimize the WED functional", cmd_minimize},
      {"reference", "Solve the gradient flow by implicit Euler", cmd_reference},
      {"causal-sweep", "Sweep epsilon and compare with the reference flow", cmd_causal_sweep},
      {"lambda-sweep", "Sweep the Moreau-Yosida level", cmd_lambda_sweep},
      {"verify-assumptions", "Sample the structural inequalities on psi and beta", cmd_verify},
      {"chain-check", "Chain-rule defect on a smooth sample trajectory at M and 2M steps", cmd_chain_check},
      {"compare", "Minimize once and report the distance to the reference flow", cmd_compare},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, m);
    subs.emplace_back(sub, handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  for (const auto& [sub, handler] : subs) {
    if (!sub->parsed()) continue;
    m.command = sub->get_name();
    try {
      Session session(m, out);
      handler(session);
      session.write_metadata();
      return kExitOk;
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << '\n';
      write_diagnostics(m, "numerical", e.what());
      return kExitNumerical;
    }
  }
  return kExitConfig;
}

}  // namespace wed::cli
