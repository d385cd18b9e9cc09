#pragma once

#include <limits>
#include <span>
#include <vector>

#include "fitslam/grid.hpp"

namespace fitslam {

inline constexpr double kSqrt2 = 1.4142135623730950488;

/// 8-connected grid path. length_m sums resolution per axis step and
/// resolution * sqrt(2) per diagonal step.
struct Path {
  std::vector<Cell> cells;
  double length_m = 0.0;
  int axis_steps = 0;
  int diagonal_steps = 0;
};

/// Cost of `axis` cardinal plus `diagonal` diagonal steps, in cells.
inline double step_cost_cells(int axis, int diagonal) { return axis + diagonal * kSqrt2; }

/// True when a move from `from` by (di, dj) stays on Free cells. A diagonal
/// move is refused when both cardinal cells it squeezes between are not Free.
bool can_move(const BinaryTraversabilityGrid& nav, Cell from, int di, int dj);

struct PlanOptions {
  /// Checks octile heuristic <= exact cost-to-go at every expanded node and
  /// throws std::logic_error on a violation. Costs an extra Dijkstra sweep.
  bool verify_heuristic = false;
};

/// A* over Free cells with the octile heuristic. Open-set ties go to the
/// larger g, then to the smaller row-major index. The start cell may be in
/// any state (it is where the robot stands); every other cell must be Free.
/// Throws NoPath when the goal is not Free or unreachable, OutOfBounds when
/// either endpoint is outside the grid.
Path plan(const BinaryTraversabilityGrid& nav, Cell start, Cell goal, const PlanOptions& options = {});

/// Single-source shortest path costs (meters) with the same move model as plan().
class DistanceField {
 public:
  static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

  DistanceField() = default;
  DistanceField(const GridSpec& spec, std::vector<double> cost_m) : spec_(spec), cost_m_(std::move(cost_m)) {}

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] double cost(Cell c) const { return cost_m_[spec_.index(c)]; }
  [[nodiscard]] bool reachable(Cell c) const { return cost(c) != kUnreachable; }

 private:
  GridSpec spec_{};
  std::vector<double> cost_m_;
};

/// Dijkstra from `start`. When `targets` is nonempty the sweep stops once all
/// of them are settled; costs are then exact for the targets and for cells
/// settled before them, and other cells read as unreachable.
DistanceField distance_field(const BinaryTraversabilityGrid& nav, Cell start, std::span<const Cell> targets = {});

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  ///< radians, toward the next sample
};

/// Samples the cell-center polyline at arc-length multiples of `spacing_m`,
/// always including the start and the final cell. The final waypoint keeps
/// the heading of the last segment. Throws ConfigError for spacing <= 0 or
/// an empty path.
std::vector<Waypoint> sample_waypoints(const Path& path, const GridSpec& spec, double spacing_m);

}  // namespace fitslam
