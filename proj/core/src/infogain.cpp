#include "fitslam/infogain.hpp"

#include <cmath>

#include "fitslam/ray_walk.hpp"

namespace fitslam {

void RayCastParams::validate() const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(fov > 0.0 && fov <= two_pi + 1e-12)) throw ConfigError("fov must be in (0, 2*pi]");
  if (!(delta_theta > 0.0 && delta_theta <= fov)) throw ConfigError("delta_theta must be in (0, fov]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
  if (!(max_range > 0.0)) throw ConfigError("max_range must be positive");
  if (!(occupied_threshold >= 0.0 && occupied_threshold <= 1.0)) {
    throw ConfigError("occupied_threshold must be in [0, 1]");
  }
}

double cell_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double map_entropy(const OccupancyGrid& occ) {
  double total = 0.0;
  for (double p : occ.data()) total += cell_entropy(p);
  return total;
}

namespace {

struct RayState {
  double gamma;
  double occupied_threshold;
  double observability = 1.0;  // gamma^N for N Unknown cells crossed so far

  // Returns false once the ray is blocked.
  bool step(double p, RayCell& out) {
    out.observability = observability;
    out.posterior = p;
    out.gain = 0.0;
    if (p == kUnknownProbability) {
      out.posterior = 0.5 * (1.0 + observability);
      out.gain = 1.0 - cell_entropy(out.posterior);
      observability *= gamma;
      return true;
    }
    if (p > occupied_threshold) {
      out.observability = 1.0;
      return false;
    }
    return true;
  }
};

}  // namespace

RayResult cast_ray(const OccupancyGrid& occ, Point2 origin, double theta, const RayCastParams& params) {
  RayResult result;
  RayState state{params.gamma, params.occupied_threshold};
  walk_ray(occ.spec(), origin, theta, params.max_range, [&](Cell c, double) {
    RayCell rc;
    rc.cell = c;
    const bool go_on = state.step(occ(c), rc);
    result.gain += rc.gain;
    result.cells.push_back(rc);
    return go_on;
  });
  return result;
}

double ray_gain(const OccupancyGrid& occ, Point2 origin, double theta, const RayCastParams& params) {
  double gain = 0.0;
  RayState state{params.gamma, params.occupied_threshold};
  walk_ray(occ.spec(), origin, theta, params.max_range, [&](Cell c, double) {
    RayCell rc;
    const bool go_on = state.step(occ(c), rc);
    gain += rc.gain;
    return go_on;
  });
  return gain;
}

std::vector<double> scan_directions(double delta_theta) {
  if (!(delta_theta > 0.0)) throw ConfigError("delta_theta must be positive");
  std::vector<double> dirs;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int k = 0;; ++k) {
    const double theta = k * delta_theta;
    if (theta >= two_pi - 1e-12) break;
    dirs.push_back(theta);
  }
  return dirs;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a > std::numbers::pi) a -= two_pi;
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

OrientationScan scan_orientations(const OccupancyGrid& occ, Point2 goal, const RayCastParams& params) {
  params.validate();
  if (!occ.spec().contains(goal.x, goal.y)) throw OutOfBounds("goal outside grid");

  OrientationScan scan;
  scan.directions = scan_directions(params.delta_theta);
  const std::size_t n = scan.directions.size();
  scan.ray_gains.resize(n);
  for (std::size_t k = 0; k < n; ++k) scan.ray_gains[k] = ray_gain(occ, goal, scan.directions[k], params);

  const double half = 0.5 * params.fov + 1e-12;
  scan.window_gains.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (std::abs(wrap_angle(scan.directions[m] - scan.directions[s])) <= half) sum += scan.ray_gains[m];
    }
    scan.window_gains[s] = sum;
    if (s == 0 || sum > scan.best_gain + kWindowTieTolerance) {
      scan.best_gain = sum;
      scan.best_theta = scan.directions[s];
    }
  }
  return scan;
}

}  // namespace fitslam
