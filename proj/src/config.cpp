#include "wed/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wed {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

// Splits "name(a,b)" into name and numeric arguments.
std::pair<std::string, std::vector<double>> call(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw ConfigError("malformed value for " + key + ": '" + text + "'");
  return {trim(t.substr(0, open)), to_list(key, t.substr(open + 1, t.size() - open - 2))};
}

void expect_args(const std::string& key, const std::string& name, const std::vector<double>& args, std::size_t n) {
  if (args.size() != n) {
    std::ostringstream msg;
    msg << key << " = " << name << " expects " << n << " argument" << (n == 1 ? "" : "s");
    throw ConfigError(msg.str());
  }
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "instance.name",        "instance.N",        "instance.T",         "instance.M",
      "instance.alpha",       "instance.g.name",   "instance.g.table",   "instance.kernel.name",
      "instance.kernel.samples", "instance.beta.name", "instance.beta.selection", "instance.u0.name",
      "instance.u0.table",    "wed.epsilon",       "wed.lambda",         "opt.method",
      "opt.g_tol",            "opt.max_iters",     "opt.armijo_c",       "opt.backtrack",
      "opt.memory",           "opt.seed",          "opt.window",         "sweep.epsilons",
      "sweep.lambdas",        "sweep.workers",     "sweep.warm_start",   "reference.newton_tol",
      "reference.newton_max", "reference.g_evaluation", "verify.R",      "verify.samples",
      "verify.seed"};
  return keys;
}

std::string Config::nearest_key(const std::string& key) {
  const auto& keys = known_keys();
  return *std::min_element(keys.begin(), keys.end(), [&](const std::string& a, const std::string& b) {
    return edit_distance(key, a) < edit_distance(key, b);
  });
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError("unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  values_[key] = trim(value);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    try {
      cfg.set(trim(content.substr(0, eq)), content.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const std::vector<std::string>& Config::builtin_names() {
  static const std::vector<std::string> names = {"heat", "kirchhoff", "rational", "nonsmooth"};
  return names;
}

Config Config::builtin(const std::string& name) {
  const std::string common =
      "instance.N = 32\ninstance.T = 1\ninstance.M = 128\ninstance.alpha = 1\ninstance.u0.name = sine(1)\n";
  if (name == "heat")
    return parse(common + "instance.name = heat\ninstance.g.name = unit\ninstance.kernel.name = delta\n"
                          "instance.beta.name = zero\n", "builtin:heat");
  if (name == "kirchhoff")
    return parse(common + "instance.name = kirchhoff\ninstance.g.name = quadratic\n"
                          "instance.kernel.name = gaussian(0.1)\ninstance.beta.name = linear(1)\n", "builtin:kirchhoff");
  if (name == "rational")
    return parse(common + "instance.name = rational\ninstance.alpha = 0.5\ninstance.g.name = rational\n"
                          "instance.kernel.name = gaussian(0.1)\ninstance.beta.name = linear(1)\n"
                          "instance.u0.name = bump\n", "builtin:rational");
  if (name == "nonsmooth")
    return parse(common + "instance.name = nonsmooth\ninstance.g.name = quadratic\n"
                          "instance.kernel.name = gaussian(0.1)\ninstance.beta.name = linear_plus_sign(1, 0.5)\n"
                          "wed.lambda = 0.01\n", "builtin:nonsmooth");
  throw ConfigError("unknown built-in instance '" + name + "'");
}

Config Config::resolve(const std::string& path_or_name) {
  if (std::filesystem::is_regular_file(path_or_name)) return load(path_or_name);
  std::string stem = std::filesystem::path(path_or_name).filename().string();
  if (stem.size() > 4 && stem.ends_with(".cfg")) stem.resize(stem.size() - 4);
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), stem) != names.end()) return builtin(stem);
  throw ConfigError("instance '" + path_or_name + "' is neither a readable file nor a built-in (heat, kirchhoff, "
                    "rational, nonsmooth)");
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(key, values_.at(key)) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string t = values_.at(key);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("invalid integer for " + key + ": '" + t + "'");
  return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = values_.at(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("invalid seed for " + key + ": '" + t + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& t = values_.at(key);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + t + "'");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? to_list(key, values_.at(key)) : fallback;
}

ProblemInstance build_instance(const Config& cfg) {
  const int n = cfg.get_int("instance.N", 32);
  const SpatialGrid grid = SpatialGrid::unit_interval(n);
  const double alpha = cfg.get_double("instance.alpha", 1.0);

  Coefficient g;
  if (cfg.has("instance.g.table")) {
    std::vector<double> s, v;
    std::stringstream ss(cfg.get("instance.g.table", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("instance.g.table entries must be 's:g'");
      s.push_back(to_double("instance.g.table", item.substr(0, colon)));
      v.push_back(to_double("instance.g.table", item.substr(colon + 1)));
    }
    g = tabulated_coefficient(std::move(s), std::move(v));
  } else {
    const std::string name = cfg.get("instance.g.name", "unit");
    if (name == "unit") g = unit_coefficient();
    else if (name == "quadratic") g = quadratic_coefficient();
    else if (name == "rational") g = rational_coefficient(alpha);
    else throw ConfigError("unknown instance.g.name '" + name + "' (unit, quadratic, rational, or use instance.g.table)");
  }

  Vector kernel;
  if (cfg.has("instance.kernel.samples")) {
    const std::vector<double> k = to_list("instance.kernel.samples", cfg.get("instance.kernel.samples", ""));
    if (static_cast<int>(k.size()) != 2 * n - 1)
      throw ConfigError("instance.kernel.samples needs 2N-1 = " + std::to_string(2 * n - 1) + " values");
    kernel = Eigen::Map<const Vector>(k.data(), static_cast<Eigen::Index>(k.size()));
  } else {
    const auto [name, args] = call("instance.kernel.name", cfg.get("instance.kernel.name", "delta"));
    if (name == "delta") kernel = delta_kernel(grid);
    else if (name == "zero") kernel = zero_kernel(grid);
    else if (name == "gaussian") {
      expect_args("instance.kernel.name", name, args, 1);
      kernel = gaussian_kernel(grid, args[0]);
    } else {
      throw ConfigError("unknown instance.kernel.name '" + name + "' (delta, gaussian(sigma))");
    }
  }

  Selection selection = Selection::midpoint;
  const std::string sel = cfg.get("instance.beta.selection", "midpoint");
  if (sel == "none") selection = Selection::none;
  else if (sel == "lower") selection = Selection::lower;
  else if (sel == "upper") selection = Selection::upper;
  else if (sel != "midpoint") throw ConfigError("unknown instance.beta.selection '" + sel + "'");

  ConvexPotential beta;
  {
    const auto [name, args] = call("instance.beta.name", cfg.get("instance.beta.name", "zero"));
    if (name == "zero") beta = zero_potential();
    else if (name == "linear") {
      expect_args("instance.beta.name", name, args, 1);
      beta = linear_potential(args[0]);
    } else if (name == "linear_plus_sign") {
      expect_args("instance.beta.name", name, args, 2);
      beta = linear_plus_sign_potential(args[0], args[1], selection);
    } else {
      throw ConfigError("unknown instance.beta.name '" + name + "' (zero, linear(a), linear_plus_sign(a,b))");
    }
  }

  Vector u0;
  {
    const auto [name, args] = call("instance.u0.name", cfg.get("instance.u0.name", "sine(1)"));
    if (name == "sine") {
      expect_args("instance.u0.name", name, args, 1);
      u0 = sine_mode(grid, static_cast<int>(args[0]));
    } else if (name == "bump") {
      u0 = bump_profile(grid);
    } else if (name == "table") {
      const std::vector<double> t = to_list("instance.u0.table", cfg.get("instance.u0.table", ""));
      if (static_cast<int>(t.size()) != n) throw ConfigError("instance.u0.table needs N values");
      u0 = Eigen::Map<const Vector>(t.data(), n);
    } else {
      throw ConfigError("unknown instance.u0.name '" + name + "' (sine(k), bump, table)");
    }
  }

  ProblemInstance inst{cfg.get("instance.name", "custom"),
                       grid,
                       DissipationModel(std::move(g), alpha, std::move(kernel)),
                       std::move(beta),
                       std::move(u0),
                       cfg.get_double("instance.T", 1.0),
                       cfg.get_int("instance.M", 64)};
  inst.validate();
  return inst;
}

WedConfig wed_config(const Config& cfg, const ProblemInstance& inst) {
  WedConfig w;
  w.epsilon = cfg.get_double("wed.epsilon", w.epsilon);
  w.lambda = cfg.get_double("wed.lambda", w.lambda);
  w.steps = inst.steps;
  w.validate();
  return w;
}

OptimizeConfig optimize_config(const Config& cfg) {
  OptimizeConfig o;
  const std::string method = cfg.get("opt.method", "lbfgs");
  if (method == "lbfgs") o.method = Method::limited_memory_quasi_newton;
  else if (method == "gd") o.method = Method::gradient_descent_armijo;
  else throw ConfigError("unknown opt.method '" + method + "' (lbfgs, gd)");
  o.g_tol = cfg.get_double("opt.g_tol", o.g_tol);
  o.max_iters = cfg.get_int("opt.max_iters", o.max_iters);
  o.armijo.c = cfg.get_double("opt.armijo_c", o.armijo.c);
  o.armijo.backtrack = cfg.get_double("opt.backtrack", o.armijo.backtrack);
  o.memory = cfg.get_int("opt.memory", o.memory);
  o.seed = cfg.get_uint("opt.seed", o.seed);
  o.window_span = cfg.get_double("opt.window", o.window_span);
  o.validate();
  return o;
}

StepperConfig stepper_config(const Config& cfg, const ProblemInstance& inst) {
  StepperConfig s;
  s.steps = inst.steps;
  s.newton_tol = cfg.get_double("reference.newton_tol", s.newton_tol);
  s.newton_max = cfg.get_int("reference.newton_max", s.newton_max);
  const std::string mode = cfg.get("reference.g_evaluation", "lagged");
  if (mode == "lagged") s.g_evaluation = CoefficientEvaluation::lagged;
  else if (mode == "implicit") s.g_evaluation = CoefficientEvaluation::implicit;
  else throw ConfigError("unknown reference.g_evaluation '" + mode + "' (lagged, implicit)");
  s.validate();
  return s;
}

SweepOptions sweep_options(const Config& cfg, const ProblemInstance& inst) {
  SweepOptions s;
  s.workers = cfg.get_int("sweep.workers", s.workers);
  if (s.workers < 1) throw ConfigError("sweep.workers must be at least 1");
  s.warm_start = cfg.get_bool("sweep.warm_start", s.warm_start);
  s.stepper = stepper_config(cfg, inst);
  return s;
}

}  // namespace wed
