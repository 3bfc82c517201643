#include "wed/problem.hpp"

#include "wed/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace wed {

namespace {

double sampled_sup(const ScalarFn& f, double radius) {
  constexpr int samples = 4000;
  double best = 0.0;
  for (int j = 0; j <= samples; ++j) {
    const double s = -radius + 2.0 * radius * j / samples;
    best = std::max(best, std::abs(f(s)));
  }
  return best;
}

// Natural cubic spline with second derivatives `curv` at the knots.
struct Spline {
  std::vector<double> s, g, curv;

  std::size_t interval(double x) const {
    auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t j = static_cast<std::size_t>(std::distance(s.begin(), it));
    return std::clamp<std::size_t>(j, 1, s.size() - 1) - 1;
  }

  // Returns value, first or second derivative at x.
  double eval(double x, int order) const {
    const std::size_t n = s.size();
    if (x < s.front() || x > s.back()) {
      const bool left = x < s.front();
      const std::size_t j = left ? 0 : n - 2;
      const double end = left ? s.front() : s.back();
      const double fend = left ? g.front() : g.back();
      const double slope = eval_inside(j, end, 1);
      if (order == 0) return fend + slope * (x - end);
      return order == 1 ? slope : 0.0;
    }
    return eval_inside(interval(x), x, order);
  }

  double eval_inside(std::size_t j, double x, int order) const {
    const double h = s[j + 1] - s[j];
    const double a = (s[j + 1] - x) / h;
    const double b = (x - s[j]) / h;
    switch (order) {
      case 0:
        return a * g[j] + b * g[j + 1] +
               ((a * a * a - a) * curv[j] + (b * b * b - b) * curv[j + 1]) * h * h / 6.0;
      case 1:
        return (g[j + 1] - g[j]) / h - (3.0 * a * a - 1.0) / 6.0 * h * curv[j] +
               (3.0 * b * b - 1.0) / 6.0 * h * curv[j + 1];
      default:
        return a * curv[j] + b * curv[j + 1];
    }
  }
};

}  // namespace

double Coefficient::sup(int order, double radius) const {
  if (sup_abs) return sup_abs(order, radius);
  const ScalarFn& f = order == 0 ? value : (order == 1 ? first : second);
  return sampled_sup(f, radius);
}

Coefficient unit_coefficient() {
  Coefficient c;
  c.name = "unit";
  c.value = [](double) { return 1.0; };
  c.first = [](double) { return 0.0; };
  c.second = [](double) { return 0.0; };
  c.sup_abs = [](int order, double) { return order == 0 ? 1.0 : 0.0; };
  return c;
}

Coefficient quadratic_coefficient() {
  Coefficient c;
  c.name = "quadratic";
  c.value = [](double s) { return 1.0 + s * s; };
  c.first = [](double s) { return 2.0 * s; };
  c.second = [](double) { return 2.0; };
  c.sup_abs = [](int order, double r) {
    switch (order) {
      case 0: return 1.0 + r * r;
      case 1: return 2.0 * r;
      default: return 2.0;
    }
  };
  return c;
}

Coefficient rational_coefficient(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("rational coefficient needs alpha > 0");
  Coefficient c;
  c.name = "rational";
  c.value = [alpha](double s) { return alpha + 1.0 / (1.0 + s * s); };
  c.first = [](double s) {
    const double q = 1.0 + s * s;
    return -2.0 * s / (q * q);
  };
  c.second = [](double s) {
    const double q = 1.0 + s * s;
    return (6.0 * s * s - 2.0) / (q * q * q);
  };
  // |g'| peaks at s = 1/sqrt(3); |g''| peaks at s = 0.
  c.sup_abs = [alpha](int order, double r) {
    switch (order) {
      case 0: return alpha + 1.0;
      case 1: {
        const double peak = 1.0 / std::sqrt(3.0);
        const double s = std::min(r, peak);
        const double q = 1.0 + s * s;
        return 2.0 * s / (q * q);
      }
      default: return 2.0;
    }
  };
  return c;
}

Coefficient tabulated_coefficient(std::vector<double> s, std::vector<double> g) {
  if (s.size() != g.size() || s.size() < 3) throw ConfigError("g.table needs at least 3 (s, g) pairs");
  for (std::size_t j = 1; j < s.size(); ++j)
    if (!(s[j] > s[j - 1])) throw ConfigError("g.table abscissae must be strictly increasing");

  const std::size_t n = s.size();
  // Interior second derivatives of the natural spline.
  Vector diag(n - 2), off(n > 3 ? n - 3 : 0), rhs(n - 2);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double hl = s[j] - s[j - 1];
    const double hr = s[j + 1] - s[j];
    diag(j - 1) = (hl + hr) / 3.0;
    if (j + 2 < n) off(j - 1) = hr / 6.0;
    rhs(j - 1) = (g[j + 1] - g[j]) / hr - (g[j] - g[j - 1]) / hl;
  }
  const Vector inner = SymmetricTridiagonal<double>(diag, off).solve(rhs);
  auto spline = std::make_shared<Spline>();
  spline->s = std::move(s);
  spline->g = std::move(g);
  spline->curv.assign(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) spline->curv[j] = inner(static_cast<Eigen::Index>(j - 1));

  Coefficient c;
  c.name = "table";
  c.value = [spline](double x) { return spline->eval(x, 0); };
  c.first = [spline](double x) { return spline->eval(x, 1); };
  c.second = [spline](double x) { return spline->eval(x, 2); };
  return c;
}

DissipationModel::DissipationModel(Coefficient coefficient, double alpha, Vector kernel)
    : coefficient_(std::move(coefficient)), alpha_(alpha), kernel_(std::move(kernel)) {
  if (!(alpha_ > 0.0)) throw ConfigError("dissipation lower bound alpha must be positive");
  if (!kernel_.allFinite()) throw ConfigError("kernel samples must be finite");
}

double DissipationModel::kernel_norm(double h) const { return std::sqrt(h * kernel_.squaredNorm()); }

void DissipationModel::check_lower_bound() const {
  for (int j = -1000; j <= 1000; ++j) {
    const double s = 0.01 * j;
    const double value = g(s);
    if (!(value >= alpha_)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "coefficient " << coefficient_.name << " violates g >= alpha at s = " << s << " (g = " << value
          << ", alpha = " << alpha_ << ")";
      throw ConfigError(msg.str());
    }
  }
}

Vector zero_kernel(const SpatialGrid& grid) { return Vector::Zero(2 * grid.size() - 1); }

Vector delta_kernel(const SpatialGrid& grid) {
  Vector k = zero_kernel(grid);
  k(grid.size() - 1) = 1.0 / grid.spacing();
  return k;
}

Vector gaussian_kernel(const SpatialGrid& grid, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian kernel needs sigma > 0");
  const int n = grid.size();
  Vector k(2 * n - 1);
  const double scale = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  for (int j = -(n - 1); j <= n - 1; ++j) {
    const double x = j * grid.spacing();
    k(j + n - 1) = scale * std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return k;
}

Vector reflect_kernel(const Vector& kernel) { return kernel.reverse(); }

double ConvexPotential::select(double r) const {
  const double lo = lower(r);
  const double hi = upper(r);
  if (lo == hi) return lo;
  switch (selection) {
    case Selection::lower: return lo;
    case Selection::upper: return hi;
    case Selection::midpoint: return 0.5 * (lo + hi);
    case Selection::none: break;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "beta " << name << " is set-valued at r = " << r << " and no selection is configured";
  throw ConfigError(msg.str());
}

ConvexPotential zero_potential() {
  ConvexPotential p;
  p.name = "zero";
  p.energy = [](double) { return 0.0; };
  p.lower = p.upper = [](double) { return 0.0; };
  p.slope = [](double) { return 0.0; };
  p.growth = 0.0;
  return p;
}

ConvexPotential linear_potential(double a) {
  if (!(a >= 0.0)) throw ConfigError("linear(a) needs a >= 0");
  ConvexPotential p;
  std::ostringstream name;
  name << "linear(" << a << ")";
  p.name = name.str();
  p.energy = [a](double r) { return 0.5 * a * r * r; };
  p.lower = p.upper = [a](double r) { return a * r; };
  p.slope = [a](double) { return a; };
  p.growth = a;
  if (a > 0.0) p.coercivity = 1.0 / a;
  return p;
}

ConvexPotential linear_plus_sign_potential(double a, double b, Selection selection) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw ConfigError("linear_plus_sign(a, b) needs a, b >= 0");
  ConvexPotential p;
  std::ostringstream name;
  name << "linear_plus_sign(" << a << "," << b << ")";
  p.name = name.str();
  p.energy = [a, b](double r) { return 0.5 * a * r * r + b * std::abs(r); };
  p.lower = [a, b](double r) { return a * r + (r > 0.0 ? b : -b); };
  p.upper = [a, b](double r) { return a * r + (r < 0.0 ? -b : b); };
  p.slope = [a](double) { return a; };
  p.growth = std::max(a, b);
  if (a > 0.0) p.coercivity = 1.0 / a;
  p.smooth = (b == 0.0);
  if (!p.smooth) p.jumps = {0.0};
  p.selection = selection;
  return p;
}

void ProblemInstance::validate() const {
  grid.check_state(u0, "initial datum u0");
  if (dissipation.kernel().size() != 2 * grid.size() - 1) {
    std::ostringstream msg;
    msg << "kernel must cover offsets -(N-1)..(N-1): expected " << 2 * grid.size() - 1 << " samples, got "
        << dissipation.kernel().size();
    throw ConfigError(msg.str());
  }
  if (!(horizon > 0.0)) throw ConfigError("horizon T must be positive");
  if (steps < 1) throw ConfigError("number of time steps M must be positive");
  dissipation.check_lower_bound();
  if (!std::isfinite(phi1(grid, u0)) || !std::isfinite(phi2(potential, grid, u0)))
    throw ConfigError("initial datum has non-finite energy");
}

Vector sine_mode(const SpatialGrid& grid, int k) {
  Vector u(grid.size());
  const double length = grid.domain_length();
  for (int i = 0; i < grid.size(); ++i) u(i) = std::sin(k * std::numbers::pi * grid.node(i) / length);
  return u;
}

Vector bump_profile(const SpatialGrid& grid) {
  Vector u(grid.size());
  const double length = grid.domain_length();
  for (int i = 0; i < grid.size(); ++i) {
    const double s = (grid.node(i) / length - 0.5) / 0.25;
    u(i) = std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  }
  return u;
}

Vector convolve(const Vector& kernel, const SpatialGrid& grid, const Vector& u) {
  const int n = grid.size();
  if (kernel.size() != 2 * n - 1) throw ConfigError("kernel length does not match the grid");
  grid.check_state(u, "convolve");
  Vector w(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += kernel(i - j + n - 1) * u(j);
    w(i) = grid.spacing() * acc;
  }
  return w;
}

CoefficientField coefficient_field(const ProblemInstance& inst, const Vector& u) {
  CoefficientField f;
  f.conv = convolve(inst.dissipation.kernel(), inst.grid, u);
  const Eigen::Index n = f.conv.size();
  f.g.resize(n);
  f.dg.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f.g(i) = inst.dissipation.g(f.conv(i));
    f.dg(i) = inst.dissipation.dg(f.conv(i));
  }
  return f;
}

double psi(const ProblemInstance& inst, const Vector& u, const Vector& v) {
  inst.grid.check_state(v, "psi rate");
  const CoefficientField f = coefficient_field(inst, u);
  return 0.5 * inst.grid.spacing() * f.g.dot(v.cwiseAbs2());
}

Vector d2_psi(const ProblemInstance& inst, const Vector& u, const Vector& v) {
  inst.grid.check_state(v, "d2_psi rate");
  return coefficient_field(inst, u).g.cwiseProduct(v);
}

Vector d1_psi(const ProblemInstance& inst, const Vector& u, const Vector& v) {
  inst.grid.check_state(v, "d1_psi rate");
  const CoefficientField f = coefficient_field(inst, u);
  const Vector density = 0.5 * f.dg.cwiseProduct(v.cwiseAbs2());
  return convolve(reflect_kernel(inst.dissipation.kernel()), inst.grid, density);
}

Vector d21_psi_apply(const ProblemInstance& inst, const Vector& u, const Vector& v, const Vector& w) {
  const CoefficientField f = coefficient_field(inst, u);
  const Vector kw = convolve(inst.dissipation.kernel(), inst.grid, w);
  return f.dg.cwiseProduct(kw).cwiseProduct(v);
}

Vector d22_psi_apply(const ProblemInstance& inst, const Vector& u, const Vector& v, const Vector& w) {
  inst.grid.check_state(v, "d22_psi rate");
  return coefficient_field(inst, u).g.cwiseProduct(w);
}

Vector apply_A(const SpatialGrid& grid, const Vector& u) {
  grid.check_state(u, "apply_A");
  const int n = grid.size();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? u(i - 1) : 0.0;
    const double right = i + 1 < n ? u(i + 1) : 0.0;
    out(i) = (2.0 * u(i) - left - right) * inv_h2;
  }
  return out;
}

double phi1(const SpatialGrid& grid, const Vector& u) {
  grid.check_state(u, "phi1");
  const int n = grid.size();
  double acc = u(0) * u(0) + u(n - 1) * u(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double d = u(i + 1) - u(i);
    acc += d * d;
  }
  return 0.5 * acc / grid.spacing();
}

double phi2(const ConvexPotential& potential, const SpatialGrid& grid, const Vector& u) {
  grid.check_state(u, "phi2");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += potential.energy(u(i));
  return grid.spacing() * acc;
}

double phi(const ProblemInstance& inst, const Vector& u) {
  return phi1(inst.grid, u) + phi2(inst.potential, inst.grid, u);
}

Vector eval_beta(const ConvexPotential& potential, const Vector& u) {
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = potential.select(u(i));
  return out;
}

}  // namespace wed
