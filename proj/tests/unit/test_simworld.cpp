#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "fitslam/simworld.hpp"

using namespace fitslam;

namespace {

WorldConfig flat_world(int landmarks) {
  WorldConfig c = parse_world_config(R"({
    "name": "flat", "seed": 3, "size_m": 10, "resolution": 0.1,
    "robot": {"start_xy_theta": [1.5, 1.5, 0.0]}
  })");
  for (int k = 0; k < landmarks; ++k) {
    Landmark l;
    l.position = Eigen::Vector3d(2.0 + 0.6 * (k % 12), 0.5 + 7.0 * (k / 12 % 2), 0.2 + 0.05 * (k % 7));
    c.explicit_landmarks.push_back(l);
  }
  return c;
}

Path drive(const World& world, MissionState& state, Cell goal) {
  sense(world, state);
  return plan(state.nav, robot_cell(world, state), goal);
}

}  // namespace

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_world_config("{"), ConfigError);
  CHECK_THROWS_AS(generate_world(parse_world_config(R"({"resolution": -1})")), ConfigError);
  CHECK_THROWS_AS(parse_world_config(R"({"size_m": "big"})"), ConfigError);
  CHECK_THROWS_AS(parse_world_config(R"({"obstacles": [{"type": "pyramid"}]})"), ConfigError);
  CHECK_THROWS_AS(preset_world("nowhere"), ConfigError);
  CHECK_THROWS_AS(load_world_config("/nonexistent/world.json"), Error);
}

TEST_CASE("presets load and override") {
  const auto names = preset_names();
  CHECK(names.size() == 3);
  for (const auto& n : names) CHECK(preset_world(n).name == n);
  const WorldConfig c = parse_world_config(R"({"preset": "ramp_yard", "seed": 99})");
  CHECK(c.name == "ramp_yard");
  CHECK(c.seed == 99);
  CHECK(c.size_x == 40.0);
}

TEST_CASE("world generation is deterministic in the seed") {
  WorldConfig c = preset_world("ramp_yard");
  const World a = generate_world(c), b = generate_world(c);
  REQUIRE(a.landmarks.size() == b.landmarks.size());
  CHECK(a.landmarks.size() == 300);
  for (std::size_t k = 0; k < a.landmarks.size(); ++k) CHECK(a.landmarks[k].position == b.landmarks[k].position);
  CHECK(a.boxes.size() == b.boxes.size());
  CHECK(a.tall_obstacle.data() == b.tall_obstacle.data());
  c.seed += 1;
  const World d = generate_world(c);
  CHECK(d.landmarks[0].position != a.landmarks[0].position);
}

TEST_CASE("flat ground surveys as fully traversable") {
  const World w = generate_world(flat_world(0));
  const GroundTruthMaps maps = survey_world(w);
  for (const auto& s : maps.trav.data()) {
    REQUIRE(s.has_value());
    CHECK(*s == 1.0);
  }
  for (NavState s : maps.nav.data()) CHECK(s == NavState::Free);
}

TEST_CASE("without landmarks the covariance only grows") {
  const World w = generate_world(flat_world(0));
  MissionState s = init_mission(w);
  const Path p = drive(w, s, Cell{60, 60});
  execute_path(w, s, p, 0.0);
  REQUIRE(s.log.size() > 3);
  for (std::size_t k = 1; k < s.log.size(); ++k) {
    if (s.log[k].distance > s.log[k - 1].distance) CHECK(s.log[k].trace_cov > s.log[k - 1].trace_cov);
  }
  CHECK(s.audit.motion_violations == 0);
  CHECK(s.n_loop_closures == 0);
  CHECK(s.known_landmarks.empty());
}

TEST_CASE("landmarks lower the covariance on the same path") {
  const World bare = generate_world(flat_world(0));
  const World rich = generate_world(flat_world(48));
  MissionState a = init_mission(bare), b = init_mission(rich);
  const Path p = drive(bare, a, Cell{75, 40});
  sense(rich, b);
  execute_path(bare, a, p, 0.0);
  execute_path(rich, b, p, 0.0);
  CHECK_FALSE(b.known_landmarks.empty());
  CHECK(b.belief.cov.trace() < a.belief.cov.trace());
  CHECK(b.audit.measurement_violations == 0);
  CHECK(b.audit.min_eigenvalue >= -1e-9);
}

TEST_CASE("measurement update never raises the trace and stays PSD") {
  const World w = generate_world(flat_world(48));
  MissionState s = init_mission(w);
  s.belief.cov = Matrix6d::Identity() * 0.01;
  s.belief.cov(0, 1) = s.belief.cov(1, 0) = 0.004;
  const SenseResult r = sense(w, s);
  REQUIRE_FALSE(r.observed_landmarks.empty());
  const double before = s.belief.cov.trace();
  measurement_update(w, s, r.observed_landmarks);
  CHECK(s.belief.cov.trace() <= before);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix6d>(s.belief.cov).eigenvalues().minCoeff() >= -1e-9);
  CHECK(s.audit.measurement_violations == 0);
}

TEST_CASE("loop closure scales the covariance by kappa") {
  WorldConfig c = flat_world(0);
  for (int k = 0; k < 6; ++k) {
    Landmark l;
    l.position = Eigen::Vector3d(4.0, 0.5 + 0.4 * k, 0.3);
    c.explicit_landmarks.push_back(l);
  }
  const World w = generate_world(c);
  MissionState s = init_mission(w);
  s.belief.cov = Matrix6d::Identity() * 0.02;
  std::vector<std::size_t> seen{0, 1, 2, 3};
  CHECK_FALSE(measurement_update(w, s, seen));  // first sightings
  s.clock = 30.0;
  CHECK_FALSE(measurement_update(w, s, seen));  // too recent
  s.clock = 61.0;
  std::vector<std::size_t> four{0, 1, 2, 3};
  CHECK_FALSE(measurement_update(w, s, four));  // below the count
  seen = {0, 1, 2, 3, 4};
  CHECK_FALSE(measurement_update(w, s, seen));  // landmark 4 is new
  s.clock = 200.0;
  const double before_fuse = s.belief.cov.trace();
  CHECK(measurement_update(w, s, seen));
  REQUIRE(s.loop_closures.size() == 1);
  const LoopClosureEvent& e = s.loop_closures.back();
  CHECK(e.landmarks == 5);
  CHECK(e.trace_before <= before_fuse);
  CHECK(e.trace_after == doctest::Approx(0.5 * e.trace_before));
  CHECK(s.n_loop_closures == 1);
}

TEST_CASE("occluded landmarks are not detected") {
  WorldConfig c = flat_world(0);
  c.boxes.push_back(BoxObstacle{3.0, 0.5, 3.4, 2.5, 1.5});
  Landmark behind, beside;
  behind.position = Eigen::Vector3d(5.0, 1.5, 0.3);
  beside.position = Eigen::Vector3d(3.0, 3.5, 0.3);
  c.explicit_landmarks = {behind, beside};
  c.robot.start_theta = 0.5;
  const World w = generate_world(c);
  MissionState s = init_mission(w);
  const SenseResult r = sense(w, s);
  REQUIRE(r.observed_landmarks.size() == 1);
  CHECK(r.observed_landmarks[0] == 1);
}

TEST_CASE("unexplored share never increases") {
  const World w = generate_world(flat_world(0));
  MissionState s = init_mission(w);
  CHECK(pct_unexplored(s) == 100.0);
  const Path p = drive(w, s, Cell{80, 20});
  execute_path(w, s, p, 1.0);
  for (std::size_t k = 1; k < s.log.size(); ++k) CHECK(s.log[k].pct_unexplored <= s.log[k - 1].pct_unexplored);
  CHECK(s.log.back().pct_unexplored < 100.0);
}

TEST_CASE("blocked path throws and keeps progress") {
  const World w = generate_world(flat_world(0));
  MissionState s = init_mission(w);
  const Path p = drive(w, s, Cell{60, 15});
  REQUIRE(p.cells.size() > 6);
  s.nav(p.cells[5]) = NavState::Blocked;
  CHECK_THROWS_AS(execute_path(w, s, p, 0.0), PathBlocked);
  CHECK(robot_cell(w, s) == p.cells[4]);
  CHECK(s.distance_traveled > 0.0);
}
