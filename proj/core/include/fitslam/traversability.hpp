#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

#include "fitslam/grid.hpp"

namespace fitslam {

struct TerrainPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Running sums of the points binned into one cell. x and y are stored
/// relative to the cell center; long double keeps the centered second
/// moments exact enough that points on a plane fit with zero residual.
struct CellMoments {
  std::size_t count = 0;
  long double sx = 0, sy = 0, sz = 0;
  long double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;

  void add(double dx, double dy, double z);
};

struct CellTerrainStats {
  std::size_t count = 0;
  double mean_z = 0.0;
  double slope = 0.0;        ///< radians between fitted-plane normal and vertical
  double roughness = 0.0;    ///< RMS residual to the fitted plane, meters
  double step_height = 0.0;  ///< max |mean_z difference| to neighbors with data, meters
};

class TerrainStatsGrid {
 public:
  TerrainStatsGrid() = default;
  explicit TerrainStatsGrid(const GridSpec& spec) : moments_(spec, CellMoments{}) {}

  [[nodiscard]] const GridSpec& spec() const { return moments_.spec(); }
  [[nodiscard]] const CellMoments& moments(Cell c) const { return moments_(c); }
  [[nodiscard]] const CellMoments& moments(std::size_t idx) const { return moments_[idx]; }
  CellMoments& moments(std::size_t idx) { return moments_[idx]; }

  /// Points that fell outside the grid and were ignored.
  [[nodiscard]] std::size_t dropped() const { return dropped_; }
  void count_dropped(std::size_t n) { dropped_ += n; }

 private:
  Grid<CellMoments> moments_;
  std::size_t dropped_ = 0;
};

struct TraversabilityParams {
  double max_slope = 30.0 * std::numbers::pi / 180.0;
  double max_roughness = 0.1;
  double max_step = 0.2;
  std::size_t min_points = 5;
};

/// Bins each point into its cell and updates the cell moments.
void accumulate_points(TerrainStatsGrid& stats, std::span<const TerrainPoint> batch);

/// Least-squares plane statistics for one cell. Step height uses neighbors
/// holding at least `min_points` points; it is 0 when there are none.
CellTerrainStats cell_stats(const TerrainStatsGrid& stats, Cell c, std::size_t min_points);

/// s = min over slope, roughness and step of clamp(1 - metric / limit, 0, 1).
double traversability_score(const CellTerrainStats& s, const TraversabilityParams& params);

TraversabilityGrid score_cells(const TerrainStatsGrid& stats, const TraversabilityParams& params);

/// Re-scores each listed cell and its 8 neighbors in place (a cell's step
/// height depends on its neighbors, so new data dirties the neighborhood).
void rescore_cells(const TerrainStatsGrid& stats, const TraversabilityParams& params,
                   TraversabilityGrid& trav, std::span<const Cell> cells);

/// Score >= t is Free, below is Blocked, Unknown stays Unknown.
/// Throws ConfigError unless t is in [0, 1].
BinaryTraversabilityGrid threshold(const TraversabilityGrid& trav, double t);

/// Thresholds each listed cell and its 8 neighbors of `trav` into `nav`.
void threshold_cells(const TraversabilityGrid& trav, double t, BinaryTraversabilityGrid& nav,
                     std::span<const Cell> cells);

/// Reads whitespace-separated `x y z` lines. Throws IoError on malformed or
/// non-finite input.
std::vector<TerrainPoint> read_terrain_points(std::istream& in);

}  // namespace fitslam
