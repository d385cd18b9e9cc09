#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Deliberately naive: no shared code paths with the library beyond
// the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "fitslam/fisher.hpp"
#include "fitslam/grid.hpp"
#include "fitslam/infogain.hpp"
#include "fitslam/traversability.hpp"

namespace oracle {

using namespace fitslam;

// ---------------------------------------------------------------------------
// Shortest paths. Costs are a + d*sqrt(2) for a cardinal and d diagonal moves;
// since sqrt(2) is irrational, equal cost means equal (a, d), so the oracle
// compares step counts with exact integer arithmetic.

struct StepCost {
  long a = 0;
  long d = 0;
  friend bool operator==(const StepCost&, const StepCost&) = default;
};

// a1 + d1 r < a2 + d2 r with r = sqrt(2), in integers.
inline bool less(const StepCost& p, const StepCost& q) {
  const long x = p.a - q.a;  // need x < y * sqrt(2)
  const long y = q.d - p.d;
  if (y >= 0) return x < 0 || x * x < 2 * y * y;
  return x < 0 && x * x > 2 * y * y;
}

inline bool free_cell(const BinaryTraversabilityGrid& nav, int i, int j) {
  return nav.spec().contains(Cell{i, j}) && nav(Cell{i, j}) == NavState::Free;
}

/// Plain Dijkstra over a binary heap. Same move model as the
/// planner: target cells must be Free; a diagonal is refused only when both
/// cardinal cells beside it are non-Free.
inline std::optional<StepCost> dijkstra(const BinaryTraversabilityGrid& nav, Cell start, Cell goal) {
  const GridSpec& spec = nav.spec();
  const std::size_t n = spec.size();
  std::vector<std::optional<StepCost>> best(n);
  std::vector<char> done(n, 0);
  best[spec.index(start)] = StepCost{};
  if (start == goal) return StepCost{};
  if (nav(goal) != NavState::Free) return std::nullopt;
  // Distinct (a, d) pairs on small grids differ by far more than double
  // rounding, so the double key orders the heap exactly.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.push({0.0, spec.index(start)});
  while (!heap.empty()) {
    const std::size_t idx = heap.top().second;
    heap.pop();
    if (done[idx]) continue;
    done[idx] = 1;
    const Cell c = spec.cell_at(idx);
    if (c == goal) return best[idx];
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ni = c.i + di, nj = c.j + dj;
        if (!free_cell(nav, ni, nj)) continue;
        const bool diagonal = di != 0 && dj != 0;
        if (diagonal && !free_cell(nav, c.i + di, c.j) && !free_cell(nav, c.i, c.j + dj)) continue;
        StepCost next = *best[idx];
        (diagonal ? next.d : next.a) += 1;
        const std::size_t nidx = spec.index(Cell{ni, nj});
        if (done[nidx]) continue;
        if (!best[nidx] || less(next, *best[nidx])) {
          best[nidx] = next;
          heap.push({static_cast<double>(next.a) + static_cast<double>(next.d) * std::numbers::sqrt2, nidx});
        }
      }
    }
  }
  return std::nullopt;
}

inline BinaryTraversabilityGrid random_nav(std::mt19937_64& rng, int n, double blocked_fraction) {
  BinaryTraversabilityGrid nav(GridSpec{0.0, 0.0, 0.05, n, n}, NavState::Free);
  std::bernoulli_distribution blocked(blocked_fraction);
  for (auto& s : nav.data()) s = blocked(rng) ? NavState::Blocked : NavState::Free;
  return nav;
}

// ---------------------------------------------------------------------------
// Ray traversal by sorting every grid-line crossing along the ray, then
// taking the cell that contains the midpoint of each resulting segment.

inline std::vector<Cell> ray_cells(const GridSpec& spec, Point2 origin, double theta, double max_range) {
  const double dx = std::cos(theta), dy = std::sin(theta);
  const double res = spec.resolution;
  std::vector<double> ts{0.0};
  const double x_lo = spec.origin_x, x_hi = spec.origin_x + spec.width * res;
  const double y_lo = spec.origin_y, y_hi = spec.origin_y + spec.height * res;
  for (int k = 0; k <= spec.width; ++k) {
    if (dx == 0.0) break;
    const double t = (x_lo + k * res - origin.x) / dx;
    if (t > 0.0 && t < max_range) ts.push_back(t);
  }
  for (int k = 0; k <= spec.height; ++k) {
    if (dy == 0.0) break;
    const double t = (y_lo + k * res - origin.y) / dy;
    if (t > 0.0 && t < max_range) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  ts.push_back(max_range);
  std::vector<Cell> cells;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (ts[k + 1] - ts[k] < 1e-12) continue;
    const double tm = 0.5 * (ts[k] + ts[k + 1]);
    const double x = origin.x + tm * dx, y = origin.y + tm * dy;
    if (x < x_lo || x >= x_hi || y < y_lo || y >= y_hi) break;
    const Cell c{static_cast<int>(std::floor((x - x_lo) / res)), static_cast<int>(std::floor((y - y_lo) / res))};
    if (cells.empty() || !(cells.back() == c)) cells.push_back(c);
  }
  return cells;
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p)) / std::numbers::ln2;
}

inline double naive_ray_gain(const OccupancyGrid& occ, Point2 origin, double theta, const RayCastParams& params) {
  double gain = 0.0;
  int unknown_crossed = 0;
  for (const Cell& c : ray_cells(occ.spec(), origin, theta, params.max_range)) {
    const double p = occ(c);
    if (p == 0.5) {
      const double posterior = 0.5 * (1.0 + std::pow(params.gamma, unknown_crossed));
      gain += 1.0 - binary_entropy(posterior);
      ++unknown_crossed;
    } else if (p > params.occupied_threshold) {
      break;
    }
  }
  return gain;
}

struct WindowScan {
  std::vector<double> window_gains;
  double best_theta = 0.0;
  double best_gain = -1.0;
};

/// Windowed sums over the direction set, using |shortest angular distance|
/// computed from the raw difference and its 2*pi complement. Sums within
/// 1e-9 of the best so far are ties and keep the earlier direction.
inline WindowScan window_scan(const OccupancyGrid& occ, Point2 goal, const RayCastParams& params) {
  std::vector<double> dirs;
  for (int k = 0; k * params.delta_theta < 2.0 * std::numbers::pi - 1e-12; ++k) dirs.push_back(k * params.delta_theta);
  std::vector<double> gains;
  for (double t : dirs) gains.push_back(naive_ray_gain(occ, goal, t, params));
  WindowScan out;
  for (std::size_t s = 0; s < dirs.size(); ++s) {
    double sum = 0.0;
    for (std::size_t m = 0; m < dirs.size(); ++m) {
      const double raw = std::abs(dirs[m] - dirs[s]);
      const double dist = std::min(raw, 2.0 * std::numbers::pi - raw);
      if (dist <= 0.5 * params.fov + 1e-12) sum += gains[m];
    }
    out.window_gains.push_back(sum);
    if (sum > out.best_gain + 1e-9) {
      out.best_gain = sum;
      out.best_theta = dirs[s];
    }
  }
  return out;
}

inline OccupancyGrid random_half_unknown(std::mt19937_64& rng, int n, double res) {
  OccupancyGrid occ(GridSpec{0.0, 0.0, res, n, n});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : occ.data()) {
    if (u(rng) < 0.5) continue;
    p = u(rng) < 0.8 ? 0.02 + 0.4 * u(rng) : 0.7 + 0.28 * u(rng);
  }
  return occ;
}

// ---------------------------------------------------------------------------
// Bearing model by finite differences on an explicitly perturbed pose.

inline Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi) {
  const double angle = phi.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, phi / angle).toRotationMatrix();
}

/// Bearing after T_wc <- (Exp(phi), rho) * T_wc, with xi = (rho, phi).
inline Eigen::Vector3d perturbed_bearing(const CameraPose& pose, const Eigen::Vector3d& landmark,
                                         const Eigen::Matrix<double, 6, 1>& xi) {
  const Eigen::Matrix3d r_wc = pose.rotation.transpose();
  const Eigen::Vector3d t_wc = -r_wc * pose.translation;
  const Eigen::Matrix3d e = exp_so3(xi.tail<3>());
  const Eigen::Matrix3d r_wc2 = e * r_wc;
  const Eigen::Vector3d t_wc2 = e * t_wc + xi.head<3>();
  const Eigen::Vector3d v = r_wc2.transpose() * (landmark - t_wc2);
  return v.normalized();
}

inline Eigen::Matrix<double, 3, 6> numeric_jacobian(const CameraPose& pose, const Eigen::Vector3d& landmark,
                                                    double h = 1e-6) {
  Eigen::Matrix<double, 3, 6> j;
  for (int k = 0; k < 6; ++k) {
    Eigen::Matrix<double, 6, 1> xi = Eigen::Matrix<double, 6, 1>::Zero();
    xi[k] = h;
    const Eigen::Vector3d plus = perturbed_bearing(pose, landmark, xi);
    xi[k] = -h;
    const Eigen::Vector3d minus = perturbed_bearing(pose, landmark, xi);
    j.col(k) = (plus - minus) / (2.0 * h);
  }
  return j;
}

/// J^T Qb^-1 J with J from finite differences and Qb built from the
/// numerically differentiated normalization.
inline Eigen::Matrix<double, 6, 6> dense_fim(const CameraPose& pose, const Landmark& l, double sigma) {
  const Eigen::Matrix<double, 3, 6> j = numeric_jacobian(pose, l.position);
  const Eigen::Vector3d v = pose.rotation * l.position + pose.translation;
  Eigen::Matrix3d p;
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d dv = Eigen::Vector3d::Zero();
    dv[k] = h;
    p.col(k) = ((v + dv).normalized() - (v - dv).normalized()) / (2.0 * h);
  }
  const Eigen::Matrix3d q = p * pose.rotation * l.covariance * pose.rotation.transpose() * p.transpose() +
                            sigma * sigma * Eigen::Matrix3d::Identity();
  return j.transpose() * q.inverse() * j;
}

// ---------------------------------------------------------------------------
// Least-squares plane fit of [x y 1] by QR on raw coordinates.

struct Plane {
  double slope = 0.0;
  double roughness = 0.0;
};

inline Plane fit_plane(const std::vector<TerrainPoint>& pts) {
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd z(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    a.row(static_cast<Eigen::Index>(k)) << pts[k].x, pts[k].y, 1.0;
    z[static_cast<Eigen::Index>(k)] = pts[k].z;
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(z);
  const Eigen::VectorXd r = a * coef - z;
  return Plane{std::atan(std::hypot(coef[0], coef[1])), std::sqrt(r.squaredNorm() / static_cast<double>(pts.size()))};
}

}  // namespace oracle
