#include "wed/grid.hpp"

#include <sstream>

namespace wed {

SpatialGrid::SpatialGrid(int n, double h) : n_(n), h_(h) {
  if (n < 2) throw ConfigError("spatial grid needs N >= 2 interior nodes");
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("spatial grid needs h > 0");
}

SpatialGrid SpatialGrid::unit_interval(int n) { return SpatialGrid(n, 1.0 / (n + 1)); }

Vector SpatialGrid::nodes() const {
  Vector x(n_);
  for (int i = 0; i < n_; ++i) x(i) = node(i);
  return x;
}

void SpatialGrid::check_state(const Vector& u, const char* what) const {
  if (u.size() != n_) {
    std::ostringstream msg;
    msg << what << ": expected " << n_ << " values, got " << u.size();
    throw ConfigError(msg.str());
  }
}

Trajectory::Trajectory(RowMatrix states, double horizon) : states_(std::move(states)), horizon_(horizon) {
  if (states_.rows() < 2) throw ConfigError("trajectory needs at least one time step");
  if (!(horizon > 0.0)) throw ConfigError("trajectory horizon must be positive");
}

Trajectory Trajectory::constant(const Vector& u0, int steps, double horizon) {
  if (steps < 1) throw ConfigError("trajectory needs at least one time step");
  RowMatrix states(steps + 1, u0.size());
  for (int m = 0; m <= steps; ++m) states.row(m) = u0.transpose();
  return Trajectory(std::move(states), horizon);
}

}  // namespace wed
