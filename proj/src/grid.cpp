#include "fermigns/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fermigns/error.hpp"

namespace fermigns {

double Grid::frequency(int k) const {
  return 2.0 * std::numbers::pi * signed_index(k) / box_length_;
}

Grid Grid::rescaled(double factor) const {
  return make_grid(box_length_ * factor, points_, center_);
}

Grid Grid::recentered(const std::array<double, 3>& center) const {
  return make_grid(box_length_, points_, center);
}

Grid make_grid(double box_length, int points, const std::array<double, 3>& center) {
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigError("box length must be positive, got " + std::to_string(box_length));
  }
  if (points % 2 != 0) {
    throw ConfigError("n must be even, got " + std::to_string(points));
  }
  if (points < 4) {
    throw ConfigError("n must be at least 4, got " + std::to_string(points));
  }
  Grid g;
  g.box_length_ = box_length;
  g.points_ = points;
  g.center_ = center;
  return g;
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (a.points() != b.points() || a.box_length() != b.box_length() ||
      a.center() != b.center()) {
    throw InputError(std::string(context) + ": grid mismatch");
  }
}

}  // namespace fermigns
