#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fitslam/grid.hpp"

namespace fitslam {

/// Axis-aligned rectangle in world meters, inclusive.
struct ExplorationBoundary {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  [[nodiscard]] bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
  /// True when the cell center is inside.
  [[nodiscard]] bool contains(const GridSpec& spec, Cell c) const;
};

/// Goals designated unreachable. A cell within one cell (Chebyshev) of a
/// blacklisted cell is suppressed too, so jitter cannot re-emit a dead goal.
class Blacklist {
 public:
  void add(Cell c);
  [[nodiscard]] bool contains(Cell c) const;
  [[nodiscard]] bool suppresses(Cell c) const;
  [[nodiscard]] int failures(Cell c) const;
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::vector<Cell> cells() const;

 private:
  static std::int64_t key(Cell c) {
    return (static_cast<std::int64_t>(c.j) << 32) | static_cast<std::uint32_t>(c.i);
  }
  std::map<std::int64_t, int> entries_;
};

struct FrontierCluster {
  std::vector<Cell> cells;  ///< breadth-first visitation order
  Cell candidate;           ///< cells[(size - 1) / 2]
};

inline constexpr int kDefaultMaxClusterSize = 30;

/// Frontier cell: inside the boundary, nav Free, occupancy known, and
/// 8-adjacent to an Unknown occupancy cell that is itself inside the
/// boundary. Returned in row-major order.
std::vector<Cell> detect_frontiers(const OccupancyGrid& occ, const BinaryTraversabilityGrid& nav,
                                   const ExplorationBoundary& boundary);

/// 8-connected components seeded in row-major order and grown breadth-first
/// with neighbor order E, NE, N, NW, W, SW, S, SE. Components larger than
/// `max_cluster_size` are cut into consecutive chunks of the visitation
/// order. Clusters whose candidate the blacklist suppresses are dropped.
std::vector<FrontierCluster> cluster_frontiers(const GridSpec& spec, std::span<const Cell> cells,
                                               int max_cluster_size, const Blacklist& blacklist);

/// No frontiers left: the mission is a success.
inline bool mission_complete(std::span<const FrontierCluster> clusters) { return clusters.empty(); }

}  // namespace fitslam
