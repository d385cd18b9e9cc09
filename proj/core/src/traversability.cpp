#include "fitslam/traversability.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace fitslam {

void CellMoments::add(double dx, double dy, double z) {
  const long double x = dx, y = dy, zz = z;
  ++count;
  sx += x;
  sy += y;
  sz += zz;
  sxx += x * x;
  sxy += x * y;
  sxz += x * zz;
  syy += y * y;
  syz += y * zz;
  szz += zz * zz;
}

void accumulate_points(TerrainStatsGrid& stats, std::span<const TerrainPoint> batch) {
  const GridSpec& spec = stats.spec();
  std::size_t dropped = 0;
  for (const TerrainPoint& p : batch) {
    const Cell c = world_to_cell_unchecked(spec, p.x, p.y);
    if (!spec.contains(c) || !std::isfinite(p.z)) {
      ++dropped;
      continue;
    }
    const double cx = spec.origin_x + (c.i + 0.5) * spec.resolution;
    const double cy = spec.origin_y + (c.j + 0.5) * spec.resolution;
    stats.moments(spec.index(c)).add(p.x - cx, p.y - cy, p.z);
  }
  stats.count_dropped(dropped);
}

namespace {

struct PlaneFit {
  double mean_z = 0.0;
  double slope = 0.0;
  double roughness = 0.0;
};

PlaneFit fit_plane(const CellMoments& m) {
  PlaneFit fit;
  if (m.count == 0) return fit;
  const long double n = static_cast<long double>(m.count);
  const long double mx = m.sx / n, my = m.sy / n, mz = m.sz / n;
  const long double cxx = m.sxx - n * mx * mx;
  const long double cxy = m.sxy - n * mx * my;
  const long double cyy = m.syy - n * my * my;
  const long double cxz = m.sxz - n * mx * mz;
  const long double cyz = m.syz - n * my * mz;
  const long double czz = std::max<long double>(0, m.szz - n * mz * mz);
  fit.mean_z = static_cast<double>(mz);

  const long double det = cxx * cyy - cxy * cxy;
  const long double scale = (cxx + cyy) * (cxx + cyy);
  if (m.count < 3 || !(det > 1e-12L * scale) || scale == 0) {
    // Points are collinear in xy: a vertical face or a single spot.
    fit.slope = czz > 0 ? std::numbers::pi / 2.0 : 0.0;
    fit.roughness = static_cast<double>(std::sqrt(czz / n));
    return fit;
  }
  const long double a = (cyy * cxz - cxy * cyz) / det;
  const long double b = (cxx * cyz - cxy * cxz) / det;
  const long double ssr = std::max<long double>(0, czz - a * cxz - b * cyz);
  fit.slope = static_cast<double>(std::atan(std::sqrt(a * a + b * b)));
  fit.roughness = static_cast<double>(std::sqrt(ssr / n));
  return fit;
}

double mean_z(const CellMoments& m) {
  return static_cast<double>(m.sz / static_cast<long double>(m.count));
}

}  // namespace

CellTerrainStats cell_stats(const TerrainStatsGrid& stats, Cell c, std::size_t min_points) {
  const GridSpec& spec = stats.spec();
  const CellMoments& m = stats.moments(c);
  CellTerrainStats out;
  out.count = m.count;
  if (m.count == 0) return out;
  const PlaneFit fit = fit_plane(m);
  out.mean_z = fit.mean_z;
  out.slope = fit.slope;
  out.roughness = fit.roughness;
  const std::size_t need = std::max<std::size_t>(min_points, 1);
  for (const auto& [di, dj] : kNeighbors8) {
    const Cell n{c.i + di, c.j + dj};
    if (!spec.contains(n)) continue;
    const CellMoments& nm = stats.moments(n);
    if (nm.count < need) continue;
    out.step_height = std::max(out.step_height, std::abs(fit.mean_z - mean_z(nm)));
  }
  return out;
}

double traversability_score(const CellTerrainStats& s, const TraversabilityParams& params) {
  auto term = [](double metric, double limit) {
    if (!(limit > 0.0)) return metric > 0.0 ? 0.0 : 1.0;
    return std::clamp(1.0 - metric / limit, 0.0, 1.0);
  };
  return std::min({term(s.slope, params.max_slope), term(s.roughness, params.max_roughness),
                   term(s.step_height, params.max_step)});
}

namespace {

void rescore_one(const TerrainStatsGrid& stats, const TraversabilityParams& params, TraversabilityGrid& trav,
                 Cell c) {
  const CellMoments& m = stats.moments(c);
  if (m.count == 0 || m.count < params.min_points) {
    trav(c).reset();
    return;
  }
  trav(c) = traversability_score(cell_stats(stats, c, params.min_points), params);
}

template <typename Fn>
void for_each_neighborhood(const GridSpec& spec, std::span<const Cell> cells, Fn fn) {
  for (const Cell& c : cells) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const Cell n{c.i + di, c.j + dj};
        if (spec.contains(n)) fn(n);
      }
    }
  }
}

}  // namespace

void rescore_cells(const TerrainStatsGrid& stats, const TraversabilityParams& params, TraversabilityGrid& trav,
                   std::span<const Cell> cells) {
  for_each_neighborhood(stats.spec(), cells, [&](Cell n) { rescore_one(stats, params, trav, n); });
}

TraversabilityGrid score_cells(const TerrainStatsGrid& stats, const TraversabilityParams& params) {
  TraversabilityGrid trav(stats.spec(), std::nullopt);
  const GridSpec& spec = stats.spec();
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) rescore_one(stats, params, trav, Cell{i, j});
  }
  return trav;
}

namespace {

void check_threshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("traversability threshold must be in [0,1]");
}

NavState classify(const std::optional<double>& s, double t) {
  if (!s) return NavState::Unknown;
  return *s >= t ? NavState::Free : NavState::Blocked;
}

}  // namespace

BinaryTraversabilityGrid threshold(const TraversabilityGrid& trav, double t) {
  check_threshold(t);
  BinaryTraversabilityGrid nav(trav.spec(), NavState::Unknown);
  for (std::size_t k = 0; k < trav.size(); ++k) nav[k] = classify(trav[k], t);
  return nav;
}

void threshold_cells(const TraversabilityGrid& trav, double t, BinaryTraversabilityGrid& nav,
                     std::span<const Cell> cells) {
  check_threshold(t);
  for_each_neighborhood(trav.spec(), cells, [&](Cell n) { nav(n) = classify(trav(n), t); });
}

std::vector<TerrainPoint> read_terrain_points(std::istream& in) {
  std::vector<TerrainPoint> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    TerrainPoint p;
    if (!(ls >> p.x >> p.y >> p.z) || !std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw IoError("malformed terrain point on line " + std::to_string(line_no));
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace fitslam
