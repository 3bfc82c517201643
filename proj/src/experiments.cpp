#include "wed/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace wed {

double l2h_distance(const Trajectory& a, const Trajectory& b, const SpatialGrid& grid) {
  if (a.steps() != b.steps() || a.nodes() != b.nodes())
    throw ConfigError("trajectories must share the discretization");
  double sum = 0.0;
  for (int m = 1; m <= a.steps(); ++m) sum += a.tau() * grid.inner((a.state(m) - b.state(m)).eval(), (a.state(m) - b.state(m)).eval());
  return std::sqrt(sum);
}

double final_distance(const Trajectory& a, const Trajectory& b, const SpatialGrid& grid) {
  if (a.steps() != b.steps() || a.nodes() != b.nodes())
    throw ConfigError("trajectories must share the discretization");
  return grid.norm((a.state(a.steps()) - b.state(b.steps())).eval());
}

namespace {

void check_descending(const std::vector<double>& values, const char* what, bool allow_zero) {
  if (values.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0 || (v == 0.0 && !allow_zero))
      throw ConfigError(std::string(what) + " values must be " + (allow_zero ? "nonnegative" : "positive"));
    if (i > 0 && !(v < values[i - 1])) throw ConfigError(std::string(what) + " values must be strictly descending");
  }
}

struct RowOutcome {
  SweepRow row;
  std::optional<Trajectory> last;
};

RowOutcome solve_row(const ProblemInstance& inst, const WedConfig& cfg, const OptimizeConfig& opt,
                     std::optional<Trajectory> init) {
  RowOutcome out;
  out.row.epsilon = cfg.epsilon;
  out.row.lambda = cfg.lambda;
  try {
    SolveReport rep = minimize(inst, cfg, opt, std::move(init));
    out.row.el_residual = rep.el.l2_norm;
    out.row.terminal_xi = rep.el.terminal_xi_norm;
    out.row.energy_slack = -energy_estimate_excess(rep.minimizer, inst, cfg);
    out.row.iterations = rep.iterations;
    out.row.wall_time = rep.wall_time;
    out.row.grad_norm = rep.grad_norm;
    out.row.converged = rep.converged;
    if (!rep.converged) {
      out.row.failed = true;
      out.row.message = "iteration budget exhausted";
    }
    out.last = std::move(rep.minimizer);
  } catch (const StalledSolve& e) {
    out.row.failed = true;
    out.row.message = e.what();
    out.last = e.last_iterate;
  } catch (const NumericalError& e) {
    out.row.failed = true;
    out.row.message = e.what();
  }
  return out;
}

// Runs the rows either as a warm-started chain or as independent cold starts.
std::vector<RowOutcome> run_rows(const ProblemInstance& inst, const std::vector<WedConfig>& cfgs,
                                 const OptimizeConfig& opt, const SweepOptions& options) {
  std::vector<RowOutcome> out(cfgs.size());
  if (options.warm_start) {
    std::optional<Trajectory> init;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      out[i] = solve_row(inst, cfgs[i], opt, init);
      if (out[i].last) init = out[i].last;
    }
    return out;
  }
  const int workers = std::clamp(options.workers, 1, static_cast<int>(cfgs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) out[i] = solve_row(inst, cfgs[i], opt, std::nullopt);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return out;
}

std::optional<double> fit_slope(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : rows)
    if (!r.failed && r.err_L2H > 0.0 && std::isfinite(r.err_L2H)) pts.emplace_back(std::log(r.epsilon), std::log(r.err_L2H));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (auto [x, y] : pts) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

void mark_missing(SweepRow& row) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.err_L2H = row.err_final = row.el_residual = row.terminal_xi = row.energy_slack = nan;
}

}  // namespace

Trajectory smooth_sample_trajectory(const ProblemInstance& inst, int steps) {
  if (steps < 1) throw ConfigError("sample trajectory needs at least one step");
  const Vector s2 = sine_mode(inst.grid, 2);
  RowMatrix states(steps + 1, inst.grid.size());
  for (int m = 0; m <= steps; ++m) {
    const double t = inst.horizon * m / steps;
    if (m == 0) states.row(m) = inst.u0.transpose();
    else states.row(m) = (std::cos(t) * inst.u0 + 0.5 * std::sin(t) * s2).transpose();
  }
  return Trajectory(states, inst.horizon);
}

SweepTable causal_sweep(const ProblemInstance& inst, const std::vector<double>& epsilons, double lambda,
                        const OptimizeConfig& opt, const SweepOptions& options) {
  check_descending(epsilons, "epsilon", false);
  StepperConfig stepper = options.stepper;
  stepper.steps = inst.steps;
  return causal_sweep(inst, solve_flow(inst, stepper), epsilons, lambda, opt, options);
}

SweepTable causal_sweep(const ProblemInstance& inst, const Trajectory& reference, const std::vector<double>& epsilons,
                        double lambda, const OptimizeConfig& opt, const SweepOptions& options) {
  check_descending(epsilons, "epsilon", false);
  if (reference.steps() != inst.steps || reference.horizon() != inst.horizon)
    throw ConfigError("reference trajectory does not match the instance time grid");
  std::vector<WedConfig> cfgs;
  for (double eps : epsilons) cfgs.push_back(WedConfig{eps, lambda, inst.steps});

  SweepTable table;
  table.reference = reference;
  for (RowOutcome& o : run_rows(inst, cfgs, opt, options)) {
    if (o.last) {
      o.row.err_L2H = l2h_distance(*o.last, reference, inst.grid);
      o.row.err_final = final_distance(*o.last, reference, inst.grid);
      if (options.keep_minimizers) o.row.minimizer = std::move(o.last);
    } else {
      mark_missing(o.row);
    }
    table.rows.push_back(std::move(o.row));
  }
  table.slope = fit_slope(table.rows);
  return table;
}

SweepTable lambda_sweep(const ProblemInstance& inst, double epsilon, const std::vector<double>& lambdas,
                        const OptimizeConfig& opt, const SweepOptions& options) {
  check_descending(lambdas, "lambda", true);
  std::vector<WedConfig> cfgs;
  for (double lam : lambdas) cfgs.push_back(WedConfig{epsilon, lam, inst.steps});
  std::vector<RowOutcome> outcomes = run_rows(inst, cfgs, opt, options);

  SweepTable table;
  table.rows.reserve(outcomes.size());
  if (inst.potential.smooth) {
    if (lambdas.back() == 0.0 && outcomes.back().last && !outcomes.back().row.failed) {
      table.reference = outcomes.back().last;
    } else {
      RowOutcome base = solve_row(inst, WedConfig{epsilon, 0.0, inst.steps}, opt,
                                  outcomes.back().last ? outcomes.back().last : std::nullopt);
      if (base.row.failed || !base.last) throw NumericalError("lambda = 0 solve failed: " + base.row.message);
      table.reference = std::move(base.last);
    }
  }

  const Trajectory* previous = nullptr;
  for (RowOutcome& o : outcomes) {
    if (!o.last) {
      mark_missing(o.row);
      table.rows.push_back(std::move(o.row));
      previous = nullptr;
      continue;
    }
    o.row.cauchy_L2H = previous ? l2h_distance(*o.last, *previous, inst.grid) : 0.0;
    if (table.reference) {
      o.row.err_L2H = l2h_distance(*o.last, *table.reference, inst.grid);
      o.row.err_final = final_distance(*o.last, *table.reference, inst.grid);
    } else {
      o.row.err_L2H = o.row.cauchy_L2H;
      o.row.err_final = previous ? final_distance(*o.last, *previous, inst.grid) : 0.0;
    }
    o.row.minimizer = std::move(o.last);
    table.rows.push_back(std::move(o.row));
    previous = &*table.rows.back().minimizer;
  }
  if (!options.keep_minimizers)
    for (SweepRow& r : table.rows) r.minimizer.reset();
  return table;
}

AssumptionConstants assumption_constants(const ProblemInstance& inst, double R) {
  const DissipationModel& d = inst.dissipation;
  const Coefficient& g = d.coefficient();
  AssumptionConstants c;
  c.kernel_norm = d.kernel_norm(inst.grid.spacing());
  const double r1 = c.kernel_norm * R;
  const double r2 = 2.0 * r1;
  c.c4 = 2.0 / d.alpha();
  c.c5 = 0.5 * c.kernel_norm * g.sup(1, r1);
  c.c6 = 0.5 * g.sup(2, r2) * c.kernel_norm * c.kernel_norm;
  const double gmax = g.sup(0, r1);
  c.c7 = gmax * gmax;
  c.c8 = g.sup(1, r2) * c.kernel_norm;
  c.c9 = g.sup(1, r1) * c.kernel_norm;
  c.c10 = d.alpha();
  c.c11 = 0.5 * (c.c7 + 1.0);
  c.c12 = 0.5 * c.c10;
  c.c13 = c.c8 * c.c8 / (2.0 * c.c10);
  return c;
}

namespace {

double ratio(double small, double big) {
  if (small <= 0.0) return 0.0;
  if (!(big > 0.0)) return std::numeric_limits<double>::infinity();
  return small / big;
}

class Cloud {
 public:
  Cloud(const SpatialGrid& grid, double R, std::uint64_t seed) : grid_(grid), R_(R), rng_(seed) {}

  /// Componentwise uniform draw rescaled to an H norm uniform in [0, R]; every
  /// tenth draw sits on the sphere of radius R.
  Vector draw() {
    const int n = grid_.size();
    const double a = R_ / std::sqrt(grid_.spacing() * n);
    std::uniform_real_distribution<double> comp(-a, a);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = comp(rng_);
    const double target = (count_++ % 10 == 0) ? R_ : R_ * unit(rng_);
    const double norm = grid_.norm(u);
    return norm > 0.0 ? Vector(u * (target / norm)) : u;
  }

  double scalar(double bound) { return std::uniform_real_distribution<double>(-bound, bound)(rng_); }

 private:
  SpatialGrid grid_;
  double R_;
  std::mt19937_64 rng_;
  std::uint64_t count_ = 0;
};

struct Tracker {
  InequalityRecord rec;

  void observe(double r, std::vector<Vector> tuple) {
    ++rec.sample_count;
    if (r > rec.worst_ratio || (std::isnan(r) && rec.pass)) {
      rec.worst_ratio = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
      if (!(r <= 1.0 + kRatioSlack)) rec.witness = std::move(tuple);
    }
    if (!(r <= 1.0 + kRatioSlack)) rec.pass = false;
  }
};

Tracker make(const char* name, const char* constant_name, double constant) {
  Tracker t;
  t.rec.name = name;
  t.rec.constant_name = constant_name;
  t.rec.constant_used = constant;
  return t;
}

}  // namespace

AssumptionReport verify_assumptions(const ProblemInstance& inst, double R, int samples, std::uint64_t seed) {
  if (!(R > 0.0)) throw ConfigError("verify.R must be positive");
  if (samples < 100) throw ConfigError("verify.samples must be at least 100");
  const SpatialGrid& grid = inst.grid;
  AssumptionReport rep;
  rep.R = R;
  rep.samples = samples;
  rep.seed = seed;
  const AssumptionConstants c = assumption_constants(inst, R);
  rep.constants = c;

  Tracker coercive = make("coercivity |v|^2 <= c4 psi(u,v)", "c4", c.c4);
  Tracker d1_bound = make("|d1 psi(u,v)| <= c5 (1 + |v|^2)", "c5", c.c5);
  Tracker d1_lip = make("|d1 psi(u1,v) - d1 psi(u2,v)| <= c6 |u1 - u2| |v|^2", "c6", c.c6);
  Tracker d2_bound = make("|d2 psi(u,v)|^2 <= c7 (1 + |v|^2)", "c7", c.c7);
  Tracker d2_lip = make("|d2 psi(u1,v) - d2 psi(u2,v)| <= c8 |u1 - u2| |v|", "c8", c.c8);
  Tracker d21 = make("|d21 psi(u,v) w| <= c9 |v| |w|", "c9", c.c9);
  Tracker d22 = make("(d22 psi(u,v) w, w) >= c10 |w|^2", "c10", c.c10);
  Tracker chain_low = make("psi(u,v) <= (d2 psi(u,v), v)", "none", 1.0);
  Tracker chain_up = make("(d2 psi(u,v), v) <= c11 (1 + |v|^2)", "c11", c.c11);
  Tracker mono = make("(d2 psi(u1,v1) - d2 psi(u2,v2), v1 - v2) >= c12 |v1 - v2|^2 - c13 |u1 - u2|^2 |v2|^2",
                      "c12,c13", c.c12);

  Cloud cloud(grid, R, seed);
  for (int s = 0; s < samples; ++s) {
    const Vector u = cloud.draw(), v = cloud.draw(), w = cloud.draw();
    const Vector u1 = cloud.draw(), u2 = cloud.draw(), v1 = cloud.draw(), v2 = cloud.draw();
    const double nv = grid.norm(v), nw = grid.norm(w), du = grid.norm((u1 - u2).eval());

    const double ps = psi(inst, u, v);
    const Vector xi = d2_psi(inst, u, v);
    const double pair = grid.inner(xi, v);
    coercive.observe(ratio(nv * nv, c.c4 * ps), {u, v});
    d1_bound.observe(ratio(grid.norm(d1_psi(inst, u, v)), c.c5 * (1.0 + nv * nv)), {u, v});
    d1_lip.observe(ratio(grid.norm((d1_psi(inst, u1, v) - d1_psi(inst, u2, v)).eval()), c.c6 * du * nv * nv),
                   {u1, u2, v});
    d2_bound.observe(ratio(grid.inner(xi, xi), c.c7 * (1.0 + nv * nv)), {u, v});
    d2_lip.observe(ratio(grid.norm((d2_psi(inst, u1, v) - d2_psi(inst, u2, v)).eval()), c.c8 * du * nv), {u1, u2, v});
    d21.observe(ratio(grid.norm(d21_psi_apply(inst, u, v, w)), c.c9 * nv * nw), {u, v, w});
    d22.observe(ratio(c.c10 * nw * nw, grid.inner(d22_psi_apply(inst, u, v, w), w)), {u, v, w});
    chain_low.observe(ratio(ps, pair), {u, v});
    chain_up.observe(ratio(pair, c.c11 * (1.0 + nv * nv)), {u, v});

    const Vector dv = v1 - v2;
    const double lhs = grid.inner((d2_psi(inst, u1, v1) - d2_psi(inst, u2, v2)).eval(), dv);
    const double nv2 = grid.norm(v2);
    mono.observe(ratio(c.c12 * grid.inner(dv, dv), lhs + c.c13 * du * du * nv2 * nv2), {u1, u2, v1, v2});
  }
  for (Tracker* t : {&coercive, &d1_bound, &d1_lip, &d2_bound, &d2_lip, &d21, &d22, &chain_low, &chain_up, &mono}) {
    rep.dissipation_pass = rep.dissipation_pass && t->rec.pass;
    rep.records.push_back(std::move(t->rec));
  }

  // Pointwise values reachable from |u|_H <= R.
  const ConvexPotential& beta = inst.potential;
  const double bound = R / std::sqrt(grid.spacing());
  Tracker growth = make("|beta(r)| <= c (1 + |r|)", "growth", beta.growth);
  std::optional<Tracker> coercivity;
  if (beta.coercivity) coercivity = make("r beta(r) >= r^2/c - c", "coercivity", *beta.coercivity);
  for (int s = 0; s < samples; ++s) {
    const double r = cloud.scalar(bound);
    const double b = std::max(std::abs(beta.lower(r)), std::abs(beta.upper(r)));
    growth.observe(ratio(b, beta.growth * (1.0 + std::abs(r))), {Vector::Constant(1, r)});
    if (coercivity) {
      const double cc = *beta.coercivity;
      const double low = std::min(r * beta.lower(r), r * beta.upper(r));
      coercivity->observe(ratio(r * r / cc, low + cc), {Vector::Constant(1, r)});
    }
  }
  rep.potential_pass = growth.rec.pass && (!coercivity || coercivity->rec.pass);
  rep.potential_records.push_back(std::move(growth.rec));
  if (coercivity) rep.potential_records.push_back(std::move(coercivity->rec));
  return rep;
}

}  // namespace wed
