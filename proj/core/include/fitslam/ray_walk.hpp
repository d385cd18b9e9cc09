#pragma once

#include <cmath>
#include <limits>

#include "fitslam/grid.hpp"

namespace fitslam {

/// Amanatides-Woo grid traversal from `origin` along `theta`. Calls
/// visit(cell, t_enter) for every crossed cell whose entry distance is below
/// `max_range`, in order and each exactly once; visit returns false to stop.
/// Throws OutOfBounds when the origin is outside the grid.
template <typename Visit>
void walk_ray(const GridSpec& spec, Point2 origin, double theta, double max_range, Visit visit) {
  Cell c = world_to_cell(spec, origin.x, origin.y);
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  const double res = spec.resolution;
  constexpr double inf = std::numeric_limits<double>::infinity();

  const int step_i = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_j = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double cell_x0 = spec.origin_x + c.i * res;
  const double cell_y0 = spec.origin_y + c.j * res;
  double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
  if (step_i != 0) {
    t_max_x = ((step_i > 0 ? cell_x0 + res : cell_x0) - origin.x) / dx;
    t_delta_x = res / std::abs(dx);
  }
  if (step_j != 0) {
    t_max_y = ((step_j > 0 ? cell_y0 + res : cell_y0) - origin.y) / dy;
    t_delta_y = res / std::abs(dy);
  }

  double t_enter = 0.0;
  while (t_enter < max_range && spec.contains(c)) {
    if (!visit(c, t_enter)) return;
    if (t_max_x < t_max_y) {
      t_enter = t_max_x;
      t_max_x += t_delta_x;
      c.i += step_i;
    } else {
      t_enter = t_max_y;
      t_max_y += t_delta_y;
      c.j += step_j;
    }
  }
}

}  // namespace fitslam
