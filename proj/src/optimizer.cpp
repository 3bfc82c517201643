#include "wed/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace wed {

namespace {

constexpr int kMaxBacktracks = 60;
constexpr int kMaxSweeps = 1000;

struct CorrectionPair {
  Vector s, y;
  double rho;
};

}  // namespace

void OptimizeConfig::validate() const {
  if (!(g_tol > 0.0)) throw ConfigError("opt.g_tol must be positive");
  if (max_iters < 1) throw ConfigError("opt.max_iters must be at least 1");
  if (!(armijo.c > 0.0 && armijo.c < 1.0)) throw ConfigError("opt.armijo_c must lie in (0, 1)");
  if (!(armijo.backtrack > 0.0 && armijo.backtrack < 1.0)) throw ConfigError("opt.backtrack must lie in (0, 1)");
  if (memory < 1) throw ConfigError("opt.memory must be at least 1");
  if (!(window_span >= 0.0)) throw ConfigError("opt.window must be >= 0");
}

SmoothResult minimize_smooth(const SmoothObjective& objective, Vector x0, const OptimizeConfig& opt) {
  opt.validate();
  const Vector& metric = objective.metric;
  auto dot = [&](const Vector& a, const Vector& b) { return (metric.array() * a.array() * b.array()).sum(); };
  auto stop_norm = [&](const Vector& g) {
    return std::sqrt((objective.norm_weights.array() * g.array().square()).sum());
  };
  const double roundoff = std::numeric_limits<double>::epsilon();

  SmoothResult res;
  res.x = std::move(x0);
  Vector g(res.x.size());
  double f = objective.evaluate(res.x, g);
  if (!std::isfinite(f)) throw NumericalError("objective is not finite at the initial point");
  res.values.push_back(f);

  std::deque<CorrectionPair> pairs;
  double scale = 1.0;       // L-BFGS initial inverse Hessian gamma * I
  double bb_step = 0.0;     // Barzilai-Borwein step for gradient descent
  Vector d, x_trial, g_trial(res.x.size());

  for (;;) {
    res.grad_norm = stop_norm(g);
    if (res.grad_norm <= opt.g_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opt.max_iters) break;

    const bool quasi_newton = opt.method == Method::limited_memory_quasi_newton;
    if (quasi_newton && !pairs.empty()) {
      Vector q = g;
      std::vector<double> a(pairs.size());
      for (std::size_t i = pairs.size(); i-- > 0;) {
        a[i] = pairs[i].rho * dot(pairs[i].s, q);
        q -= a[i] * pairs[i].y;
      }
      q *= scale;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double b = pairs[i].rho * dot(pairs[i].y, q);
        q += (a[i] - b) * pairs[i].s;
      }
      d = -q;
    } else {
      d = -g;
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = -g;
      slope = dot(g, d);
    }

    double step;
    if (quasi_newton && !pairs.empty()) step = 1.0;
    else if (!quasi_newton && bb_step > 0.0) step = bb_step;
    else step = std::min(1.0, 1.0 / std::sqrt(dot(g, g)));

    bool accepted = false;
    double f_trial = f;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      x_trial = res.x + step * d;
      if (x_trial == res.x) break;
      try {
        f_trial = objective.evaluate(x_trial, g_trial);
      } catch (const NumericalError&) {
        f_trial = std::numeric_limits<double>::quiet_NaN();
      }
      if (std::isfinite(f_trial)) {
        const double noise = 64.0 * roundoff * (std::abs(f) + std::abs(f_trial));
        if (std::abs(f_trial - f) <= noise) {
          // Value change below rounding: trapezoid estimate of the decrease.
          accepted = 0.5 * (slope + dot(g_trial, d)) <= opt.armijo.c * slope;
        } else {
          accepted = f_trial - f <= opt.armijo.c * step * slope;
        }
      }
      if (accepted) break;
      step *= opt.armijo.backtrack;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "stalled line search after " << kMaxBacktracks << " backtracks at iteration " << res.iterations
          << " (gradient norm " << res.grad_norm << ")";
      throw StalledLineSearch(msg.str(), res.x);
    }

    Vector s = x_trial - res.x;
    Vector y = g_trial - g;
    const double sy = dot(s, y);
    const double yy = dot(y, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * yy) && std::isfinite(sy)) {
      bb_step = dot(s, s) / sy;
      scale = sy / yy;
      if (quasi_newton) {
        pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
        if (static_cast<int>(pairs.size()) > opt.memory) pairs.pop_front();
      }
    }
    res.x.swap(x_trial);
    g.swap(g_trial);
    f = f_trial;
    res.values.push_back(f);
    ++res.iterations;
  }
  res.value = f;
  return res;
}

double normalized_gradient_norm(const Trajectory& traj, const ProblemInstance& inst, const WedConfig& cfg) {
  const RowMatrix g = WedEvaluator(inst, cfg).normalized_gradient(traj);
  return std::sqrt(traj.tau() * inst.grid.spacing() * g.squaredNorm());
}

namespace {

struct Window {
  int first;
  int last;
};

std::vector<Window> make_windows(int steps, double tau, double epsilon, double span) {
  if (span <= 0.0) return {{1, steps}};
  const double nodes = std::ceil(span * epsilon / tau);
  if (nodes >= steps) return {{1, steps}};
  const int width = std::max(4, static_cast<int>(nodes));
  if (width >= steps) return {{1, steps}};
  const int stride = std::max(1, width / 2);
  std::vector<Window> out;
  for (int a = 1;; a += stride) {
    const int b = std::min(a + width - 1, steps);
    out.push_back({a, b});
    if (b == steps) break;
  }
  return out;
}

}  // namespace

SolveReport minimize(const ProblemInstance& inst, const WedConfig& cfg, const OptimizeConfig& opt,
                     std::optional<Trajectory> init) {
  const auto start = std::chrono::steady_clock::now();
  opt.validate();
  inst.validate();
  WedEvaluator eval(inst, cfg);
  Trajectory traj = init ? std::move(*init) : Trajectory::constant(inst.u0, cfg.steps, inst.horizon);
  eval.check_admissible(traj);

  const int steps = traj.steps();
  const int n = traj.nodes();
  const double tau = traj.tau();
  const double h = inst.grid.spacing();
  const std::vector<Window> windows = make_windows(steps, tau, cfg.epsilon, opt.window_span);

  SolveReport report{traj, {}, 0.0, 0, false, {}, 0.0, 0, static_cast<int>(windows.size()), {}};

  auto solve_window = [&](const Window& w, double tol, int budget) {
    const int rows = w.last - w.first + 1;
    SmoothObjective obj;
    obj.metric.resize(rows * n);
    obj.norm_weights = Vector::Constant(rows * n, tau * h);
    for (int r = 0; r < rows; ++r)
      obj.metric.segment(r * n, n).setConstant(tau * h * std::exp(-r * tau / cfg.epsilon));
    RowMatrix grad;
    obj.evaluate = [&](const Vector& x, Vector& gradient) {
      traj.states().middleRows(w.first, rows) = Eigen::Map<const RowMatrix>(x.data(), rows, n);
      const double value = eval.window(traj, w.first, w.last, &grad);
      gradient = Eigen::Map<const Vector>(grad.data(), rows * n);
      return value;
    };
    RowMatrix block = traj.states().middleRows(w.first, rows);
    Vector x0 = Eigen::Map<const Vector>(block.data(), rows * n);

    OptimizeConfig local = opt;
    local.g_tol = tol;
    local.max_iters = std::max(1, budget);
    try {
      SmoothResult res = minimize_smooth(obj, std::move(x0), local);
      traj.states().middleRows(w.first, rows) = Eigen::Map<const RowMatrix>(res.x.data(), rows, n);
      return res;
    } catch (const StalledLineSearch& e) {
      traj.states().middleRows(w.first, rows) = Eigen::Map<const RowMatrix>(e.last_iterate.data(), rows, n);
      throw StalledSolve(e.what(), traj);
    }
  };

  if (windows.size() == 1) {
    const SmoothResult res = solve_window(windows.front(), opt.g_tol, opt.max_iters);
    report.iterations = res.iterations;
    report.sweeps = 1;
    const double base = cfg.weight(traj.time(1));
    for (double v : res.values) report.value_history.push_back(base * v);
  } else {
    report.value_history.push_back(eval.value(traj).total);
    double tol = opt.g_tol / (2.0 * std::sqrt(static_cast<double>(windows.size())));
    for (int sweep = 0; sweep < kMaxSweeps && report.iterations < opt.max_iters; ++sweep) {
      int sweep_iterations = 0;
      for (const Window& w : windows) {
        const SmoothResult res = solve_window(w, tol, opt.max_iters - report.iterations);
        sweep_iterations += res.iterations;
        report.iterations += res.iterations;
        report.value_history.push_back(eval.value(traj).total);
        if (report.iterations >= opt.max_iters) break;
      }
      ++report.sweeps;
      if (normalized_gradient_norm(traj, inst, cfg) <= opt.g_tol) break;
      if (sweep_iterations == 0) tol *= 0.25;
    }
  }

  report.minimizer = traj;
  report.value = eval.value(traj);
  report.grad_norm = normalized_gradient_norm(traj, inst, cfg);
  report.converged = report.grad_norm <= opt.g_tol;
  report.el = eval.el_residual(traj);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<SolveReport> continuation_minimize(const ProblemInstance& inst, const std::vector<WedConfig>& cfgs,
                                               const OptimizeConfig& opt) {
  if (cfgs.empty()) throw ConfigError("continuation needs at least one configuration");
  for (const WedConfig& c : cfgs)
    if (c.steps != cfgs.front().steps) throw ConfigError("continuation configurations must share M");
  std::vector<SolveReport> out;
  out.reserve(cfgs.size());
  for (const WedConfig& c : cfgs) {
    std::optional<Trajectory> init;
    if (!out.empty()) init = out.back().minimizer;
    out.push_back(minimize(inst, c, opt, std::move(init)));
  }
  return out;
}

}  // namespace wed
