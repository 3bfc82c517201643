#pragma once

#include "wed/config.hpp"

#include <random>
#include <string>

namespace testing_support {

/// Instance from configuration lines; unspecified keys take library defaults.
inline wed::ProblemInstance instance(const std::string& text) { return wed::build_instance(wed::Config::parse(text)); }

inline wed::ProblemInstance builtin(const std::string& name, int n = 32, int steps = 128) {
  wed::Config cfg = wed::Config::builtin(name);
  cfg.set("instance.N", std::to_string(n));
  cfg.set("instance.M", std::to_string(steps));
  return wed::build_instance(cfg);
}

/// Trajectory with u_0 = inst.u0 and random later states.
inline wed::Trajectory random_trajectory(const wed::ProblemInstance& inst, int steps, std::mt19937_64& rng,
                                         double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  wed::RowMatrix states(steps + 1, inst.grid.size());
  for (int m = 0; m <= steps; ++m)
    for (int i = 0; i < inst.grid.size(); ++i) states(m, i) = m == 0 ? inst.u0(i) : inst.u0(i) + d(rng);
  return wed::Trajectory(states, inst.horizon);
}

}  // namespace testing_support
