#pragma once

#include <iosfwd>
#include <string>

#include "fitslam/grid.hpp"

// Portable text raster. Header line `width height resolution origin_x origin_y`,
// then one line per row (j = 0 first) of whitespace-separated cell tokens:
// probabilities/scores as shortest round-trip decimals, Unknown as `?`,
// Free as `.` and Blocked as `#`.

namespace fitslam {

void write_raster(std::ostream& out, const OccupancyGrid& grid);
void write_raster(std::ostream& out, const TraversabilityGrid& grid);
void write_raster(std::ostream& out, const BinaryTraversabilityGrid& grid);

/// Throws IoError on malformed input.
OccupancyGrid read_occupancy_raster(std::istream& in);
TraversabilityGrid read_traversability_raster(std::istream& in);
BinaryTraversabilityGrid read_binary_raster(std::istream& in);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace fitslam
