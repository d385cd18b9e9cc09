#include "fitslam/raster_io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

namespace fitslam {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw IoError("failed to format value");
  return std::string(buf.data(), ptr);
}

namespace {

void write_header(std::ostream& out, const GridSpec& spec) {
  out << spec.width << ' ' << spec.height << ' ' << format_double(spec.resolution) << ' '
      << format_double(spec.origin_x) << ' ' << format_double(spec.origin_y) << '\n';
}

template <typename Grid, typename TokenFn>
void write_cells(std::ostream& out, const Grid& grid, TokenFn token) {
  write_header(out, grid.spec());
  for (int j = 0; j < grid.height(); ++j) {
    for (int i = 0; i < grid.width(); ++i) {
      if (i > 0) out << ' ';
      out << token(grid(Cell{i, j}));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing raster");
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw IoError("malformed raster value '" + token + "'");
  }
  return v;
}

GridSpec read_header(std::istream& in) {
  GridSpec spec;
  std::string res, ox, oy;
  if (!(in >> spec.width >> spec.height >> res >> ox >> oy)) throw IoError("malformed raster header");
  spec.resolution = parse_double(res);
  spec.origin_x = parse_double(ox);
  spec.origin_y = parse_double(oy);
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("invalid raster header: ") + e.what());
  }
  return spec;
}

template <typename Grid, typename ParseFn>
void read_cells(std::istream& in, Grid& grid, ParseFn parse) {
  std::string token;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(in >> token)) throw IoError("raster truncated");
    grid[k] = parse(token);
  }
}

}  // namespace

void write_raster(std::ostream& out, const OccupancyGrid& grid) {
  write_cells(out, grid, [](double p) {
    return p == kUnknownProbability ? std::string("?") : format_double(p);
  });
}

void write_raster(std::ostream& out, const TraversabilityGrid& grid) {
  write_cells(out, grid, [](const std::optional<double>& s) {
    return s ? format_double(*s) : std::string("?");
  });
}

void write_raster(std::ostream& out, const BinaryTraversabilityGrid& grid) {
  write_cells(out, grid, [](NavState s) {
    switch (s) {
      case NavState::Free: return '.';
      case NavState::Blocked: return '#';
      case NavState::Unknown: break;
    }
    return '?';
  });
}

OccupancyGrid read_occupancy_raster(std::istream& in) {
  OccupancyGrid grid(read_header(in));
  read_cells(in, grid, [](const std::string& t) {
    if (t == "?") return kUnknownProbability;
    const double p = parse_double(t);
    if (!(p >= 0.0 && p <= 1.0)) throw IoError("occupancy probability out of [0,1]: " + t);
    return p;
  });
  return grid;
}

TraversabilityGrid read_traversability_raster(std::istream& in) {
  TraversabilityGrid grid(read_header(in), std::nullopt);
  read_cells(in, grid, [](const std::string& t) -> std::optional<double> {
    if (t == "?") return std::nullopt;
    const double s = parse_double(t);
    if (!(s >= 0.0 && s <= 1.0)) throw IoError("traversability score out of [0,1]: " + t);
    return s;
  });
  return grid;
}

BinaryTraversabilityGrid read_binary_raster(std::istream& in) {
  BinaryTraversabilityGrid grid(read_header(in), NavState::Unknown);
  read_cells(in, grid, [](const std::string& t) {
    if (t == ".") return NavState::Free;
    if (t == "#") return NavState::Blocked;
    if (t == "?") return NavState::Unknown;
    throw IoError("malformed binary raster token '" + t + "'");
  });
  return grid;
}

}  // namespace fitslam
