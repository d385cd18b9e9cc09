#pragma once

#include <numbers>
#include <vector>

#include "fitslam/grid.hpp"

namespace fitslam {

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct RayCastParams {
  double delta_theta = deg2rad(8.5);  ///< spacing of the discretized ray directions
  double fov = deg2rad(87.0);         ///< horizontal camera field of view
  double max_range = 5.0;             ///< meters
  double gamma = 0.9;                 ///< observability decay per Unknown cell already crossed
  double occupied_threshold = 0.65;   ///< p above this blocks the ray

  /// Throws ConfigError when any field is out of range.
  void validate() const;
};

/// Binary Shannon entropy in bits, with 0 * log2(0) = 0.
double cell_entropy(double p);

/// Sum of cell entropies over the grid.
double map_entropy(const OccupancyGrid& occ);

struct RayCell {
  Cell cell;
  double observability = 1.0;
  double posterior = 0.5;
  double gain = 0.0;  ///< bits
};

struct RayResult {
  std::vector<RayCell> cells;  ///< in traversal order, origin cell first
  double gain = 0.0;           ///< bits, sum of per-cell gains
};

/// Walks the cells crossed by the ray (each exactly once) until `max_range`,
/// the grid edge, or a cell with p > occupied_threshold. The k-th Unknown
/// cell (k from 0) has observability gamma^k, posterior (1 + gamma^k) / 2 and
/// gain 1 - H(posterior); known cells gain nothing. Throws OutOfBounds when
/// the origin is outside the grid.
RayResult cast_ray(const OccupancyGrid& occ, Point2 origin, double theta, const RayCastParams& params);

/// Ray gain only; avoids materializing the cell list.
double ray_gain(const OccupancyGrid& occ, Point2 origin, double theta, const RayCastParams& params);

struct OrientationScan {
  std::vector<double> directions;  ///< k * delta_theta for k = 0.. while < 2*pi
  std::vector<double> ray_gains;   ///< gain of the ray in each direction
  std::vector<double> window_gains;  ///< summed ray gains within +/- fov/2 of each direction
  double best_theta = 0.0;
  double best_gain = 0.0;
};

/// Discretized direction set {0, dtheta, 2 dtheta, ...} below 2*pi.
std::vector<double> scan_directions(double delta_theta);

/// Angle wrapped to (-pi, pi].
double wrap_angle(double a);

/// Window gains closer than this count as equal.
inline constexpr double kWindowTieTolerance = 1e-9;

/// Best arrival orientation at `goal`: the direction whose fov window
/// collects the most ray gain (wrap-around honored, ties to the smaller angle).
OrientationScan scan_orientations(const OccupancyGrid& occ, Point2 goal, const RayCastParams& params);

}  // namespace fitslam
