#pragma once

#include "wed/experiments.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wed {

/// Flat `key = value` settings with dotted sections. `#` starts a comment.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);
  /// Built-in instance settings: heat, kirchhoff, rational, nonsmooth.
  static Config builtin(const std::string& name);
  static const std::vector<std::string>& builtin_names();
  /// A readable file path, or the name (with or without `.cfg`) of a built-in.
  static Config resolve(const std::string& path_or_name);

  /// Throws ConfigError for unknown keys, naming the closest valid key.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  static const std::vector<std::string>& known_keys();
  static std::string nearest_key(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

ProblemInstance build_instance(const Config& cfg);
WedConfig wed_config(const Config& cfg, const ProblemInstance& inst);
OptimizeConfig optimize_config(const Config& cfg);
StepperConfig stepper_config(const Config& cfg, const ProblemInstance& inst);
SweepOptions sweep_options(const Config& cfg, const ProblemInstance& inst);

}  // namespace wed
