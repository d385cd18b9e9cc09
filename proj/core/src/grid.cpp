#include "fitslam/grid.hpp"

#include <cmath>
#include <string>

namespace fitslam {

void GridSpec::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ConfigError("grid resolution must be positive, got " + std::to_string(resolution));
  }
  if (width < 1 || height < 1) {
    throw ConfigError("grid dimensions must be at least 1x1");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw ConfigError("grid origin must be finite");
  }
}

bool GridSpec::contains(double x, double y) const {
  const double fx = std::floor((x - origin_x) / resolution);
  const double fy = std::floor((y - origin_y) / resolution);
  return fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(width) && fy < static_cast<double>(height);
}

Cell world_to_cell_unchecked(const GridSpec& spec, double x, double y) {
  return {static_cast<int>(std::floor((x - spec.origin_x) / spec.resolution)),
          static_cast<int>(std::floor((y - spec.origin_y) / spec.resolution))};
}

Cell world_to_cell(const GridSpec& spec, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y) || !spec.contains(x, y)) {
    throw OutOfBounds("point (" + std::to_string(x) + ", " + std::to_string(y) + ") outside grid");
  }
  return world_to_cell_unchecked(spec, x, y);
}

Point2 cell_to_world(const GridSpec& spec, int i, int j) {
  if (!spec.contains(Cell{i, j})) {
    throw OutOfBounds("cell (" + std::to_string(i) + ", " + std::to_string(j) + ") outside grid");
  }
  return {spec.origin_x + (i + 0.5) * spec.resolution, spec.origin_y + (j + 0.5) * spec.resolution};
}

}  // namespace fitslam
