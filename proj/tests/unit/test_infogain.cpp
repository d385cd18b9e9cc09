#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "fitslam/infogain.hpp"

using namespace fitslam;

TEST_CASE("entropy fixed points") {
  CHECK(cell_entropy(0.5) == 1.0);
  CHECK(cell_entropy(0.0) == 0.0);
  CHECK(cell_entropy(1.0) == 0.0);
  CHECK(cell_entropy(0.2) == doctest::Approx(cell_entropy(0.8)));
  CHECK(map_entropy(OccupancyGrid(GridSpec{0, 0, 1, 4, 5})) == 20.0);
}

TEST_CASE("degradation chain along an unknown ray") {
  OccupancyGrid occ(GridSpec{0, 0, 1.0, 10, 1});
  RayCastParams p;
  p.max_range = 10.0;
  const RayResult r = cast_ray(occ, Point2{0.5, 0.5}, 0.0, p);
  REQUIRE(r.cells.size() == 10);
  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    CHECK(r.cells[k].cell == Cell{static_cast<int>(k), 0});
    CHECK(r.cells[k].observability == doctest::Approx(std::pow(0.9, static_cast<double>(k))));
    CHECK(r.cells[k].posterior == doctest::Approx((1.0 + std::pow(0.9, static_cast<double>(k))) / 2.0));
  }
  CHECK(r.cells[0].gain == 1.0);
  CHECK(r.cells[3].posterior == doctest::Approx(0.8645).epsilon(1e-12));
  CHECK(r.cells[3].gain == doctest::Approx(1.0 - oracle::binary_entropy(0.8645)).epsilon(1e-12));
  CHECK(r.gain == doctest::Approx(ray_gain(occ, Point2{0.5, 0.5}, 0.0, p)));
}

TEST_CASE("occupied cells stop rays and known cells add nothing") {
  OccupancyGrid occ(GridSpec{0, 0, 1.0, 6, 1});
  occ(Cell{1, 0}) = 0.2;
  occ(Cell{3, 0}) = 0.9;
  RayCastParams p;
  p.max_range = 10.0;
  const RayResult r = cast_ray(occ, Point2{0.5, 0.5}, 0.0, p);
  REQUIRE(r.cells.size() == 4);
  CHECK(r.cells[1].gain == 0.0);
  CHECK(r.cells[2].observability == doctest::Approx(0.9));
  CHECK(r.cells[3].gain == 0.0);
  occ(Cell{3, 0}) = 0.65;
  CHECK(cast_ray(occ, Point2{0.5, 0.5}, 0.0, p).cells.size() == 6);
}

TEST_CASE("ray traversal matches the crossing-sort oracle") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(0.0, 3.2), ang(-4.0, 4.0);
  OccupancyGrid occ(GridSpec{0, 0, 0.05, 64, 64});
  RayCastParams p;
  p.occupied_threshold = 1.1;
  for (int k = 0; k < 500; ++k) {
    const Point2 o{pos(rng), pos(rng)};
    const double t = ang(rng);
    const RayResult r = cast_ray(occ, o, t, p);
    const auto cells = oracle::ray_cells(occ.spec(), o, t, p.max_range);
    REQUIRE(r.cells.size() == cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) CHECK(r.cells[c].cell == cells[c]);
  }
}

TEST_CASE("orientation scan equals the windowed-sum oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  RayCastParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid occ = oracle::random_half_unknown(rng, 64, 0.05);
    const Point2 g{pos(rng), pos(rng)};
    const OrientationScan s = scan_orientations(occ, g, p);
    const oracle::WindowScan o = oracle::window_scan(occ, g, p);
    REQUIRE(s.window_gains.size() == o.window_gains.size());
    for (std::size_t k = 0; k < o.window_gains.size(); ++k) {
      CHECK(std::abs(s.window_gains[k] - o.window_gains[k]) <= 1e-12);
    }
    CHECK(s.best_theta == o.best_theta);
  }
}

TEST_CASE("direction set and window size") {
  const auto dirs = scan_directions(deg2rad(8.5));
  CHECK(dirs.size() == 43);
  CHECK(dirs.back() == doctest::Approx(42 * deg2rad(8.5)));
  CHECK(scan_directions(deg2rad(90.0)).size() == 4);
  CHECK_THROWS_AS(scan_directions(0.0), ConfigError);
  // 87 deg / 8.5 deg: 5 directions on each side plus the center.
  OccupancyGrid occ(GridSpec{0, 0, 0.1, 20, 20});
  RayCastParams p;
  p.max_range = 0.01;
  const OrientationScan s = scan_orientations(occ, Point2{1.05, 1.05}, p);
  for (double w : s.window_gains) CHECK(w == doctest::Approx(11.0));
  CHECK(s.best_theta == 0.0);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2 * std::numbers::pi));
}

TEST_CASE("ray-cast parameters are validated") {
  RayCastParams p;
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.delta_theta = 2 * p.fov;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  OccupancyGrid occ(GridSpec{0, 0, 0.1, 5, 5});
  CHECK_THROWS_AS(scan_orientations(occ, Point2{9, 9}, RayCastParams{}), OutOfBounds);
}
