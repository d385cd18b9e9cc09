#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fitslam/errors.hpp"

namespace fitslam {

/// Integer cell coordinates. `i` indexes x (columns), `j` indexes y (rows).
struct Cell {
  int i = 0;
  int j = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Placement of a dense grid in the world frame. Cell (i, j) covers the
/// half-open box [origin + i*res, origin + (i+1)*res) on each axis.
struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.05;
  int width = 1;
  int height = 1;

  /// Throws ConfigError when resolution <= 0 or a dimension is < 1.
  void validate() const;

  [[nodiscard]] bool contains(Cell c) const {
    return c.i >= 0 && c.j >= 0 && c.i < width && c.j < height;
  }
  [[nodiscard]] bool contains(double x, double y) const;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  /// Row-major linear index.
  [[nodiscard]] std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.j) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.i);
  }
  [[nodiscard]] Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width)),
            static_cast<int>(index / static_cast<std::size_t>(width))};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws OutOfBounds when (x, y) is outside the grid extent.
Cell world_to_cell(const GridSpec& spec, double x, double y);

/// Cell index without bounds checking; may lie outside the grid.
Cell world_to_cell_unchecked(const GridSpec& spec, double x, double y);

/// Center of cell (i, j). Throws OutOfBounds when the cell is outside the grid.
Point2 cell_to_world(const GridSpec& spec, int i, int j);
inline Point2 cell_to_world(const GridSpec& spec, Cell c) { return cell_to_world(spec, c.i, c.j); }

/// Dense row-major grid of values. Value type; copy to snapshot.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(const GridSpec& spec, T fill) : spec_(spec), cells_(spec.size(), fill) { spec.validate(); }

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] int width() const { return spec_.width; }
  [[nodiscard]] int height() const { return spec_.height; }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }

  [[nodiscard]] const T& operator[](std::size_t idx) const { return cells_[idx]; }
  T& operator[](std::size_t idx) { return cells_[idx]; }
  [[nodiscard]] const T& operator()(Cell c) const { return cells_[spec_.index(c)]; }
  T& operator()(Cell c) { return cells_[spec_.index(c)]; }

  [[nodiscard]] const T& at(Cell c) const {
    if (!spec_.contains(c)) throw OutOfBounds("cell outside grid");
    return cells_[spec_.index(c)];
  }

  [[nodiscard]] const std::vector<T>& data() const { return cells_; }
  std::vector<T>& data() { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  GridSpec spec_{};
  std::vector<T> cells_;
};

inline constexpr double kUnknownProbability = 0.5;

/// Occupancy probability per cell; Unknown is exactly 0.5.
class OccupancyGrid : public Grid<double> {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridSpec& spec) : Grid<double>(spec, kUnknownProbability) {}

  [[nodiscard]] bool is_unknown(std::size_t idx) const { return (*this)[idx] == kUnknownProbability; }
  [[nodiscard]] bool is_unknown(Cell c) const { return (*this)(c) == kUnknownProbability; }
};

/// Traversability score in [0, 1], or empty for Unknown.
using TraversabilityGrid = Grid<std::optional<double>>;

enum class NavState : std::uint8_t { Unknown, Free, Blocked };

using BinaryTraversabilityGrid = Grid<NavState>;

/// The 8 neighbor offsets in the fixed order E, NE, N, NW, W, SW, S, SE.
inline constexpr std::pair<int, int> kNeighbors8[8] = {
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

}  // namespace fitslam
