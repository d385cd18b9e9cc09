#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fitslam/fisher.hpp"
#include "fitslam/frontier.hpp"
#include "fitslam/grid.hpp"
#include "fitslam/planner.hpp"
#include "fitslam/traversability.hpp"

namespace fitslam {

// ---------------------------------------------------------------------------
// World description

/// Gaussian hill: z += amplitude * exp(-r^2 / (2 sigma^2)).
struct Bump {
  double x = 0.0, y = 0.0;
  double amplitude = 0.0;
  double sigma = 1.0;
};

/// Terrace: z += rise * clamp((p . dir - start) / (end - start), 0, 1), with
/// dir the unit vector at `heading`.
struct Ramp {
  double heading = 0.0;
  double start = 0.0;
  double end = 1.0;
  double rise = 0.0;
};

/// Axis-aligned box standing on the terrain.
struct BoxObstacle {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  double height = 1.0;
};

/// Annulus standing on the terrain.
struct RingObstacle {
  double cx = 0.0, cy = 0.0;
  double inner_radius = 1.0, outer_radius = 1.2;
  double height = 0.2;
};

/// Randomly generated terrain features and clutter, drawn from the seed.
struct RandomFeatures {
  int bumps = 0;
  double bump_amplitude_min = 0.2, bump_amplitude_max = 0.5;
  double bump_sigma_min = 1.5, bump_sigma_max = 3.0;
  int mounds = 0;  ///< steep, untraversable hills
  double mound_amplitude_min = 1.0, mound_amplitude_max = 1.5;
  double mound_sigma_min = 0.6, mound_sigma_max = 1.0;
  int ramps = 0;
  double ramp_rise_min = 0.3, ramp_rise_max = 0.8;
  double ramp_run_min = 6.0, ramp_run_max = 10.0;
  int boxes = 0;
  double box_length_min = 0.5, box_length_max = 3.0;
  double box_width_min = 0.3, box_width_max = 1.0;
  double box_height_min = 1.0, box_height_max = 2.0;
  double keep_out_radius = 3.0;  ///< clear zone around the start pose
};

struct SensorConfig {
  double fov = deg2rad(87.0);
  double max_depth = 5.0;
  double lidar_radius = 8.0;
  double sensor_height = 0.3;
};

struct RobotConfig {
  double start_x = 1.0, start_y = 1.0, start_theta = 0.0;
  double speed = 0.4;      ///< m/s
  double turn_rate = 1.0;  ///< rad/s
};

/// Constants of the localization-covariance stand-in for a SLAM backend.
struct SurrogateConfig {
  double q = 1e-3;       ///< dead-reckoning growth per meter
  double kappa = 0.5;    ///< loop-closure contraction factor
  double t_lc = 60.0;    ///< age of a landmark's first sighting before it counts as a revisit
  int min_revisits = 5;  ///< old landmarks seen at once to declare a loop closure
  double bearing_sigma = 0.01;
};

struct OccupancyUpdateConfig {
  double hit_log_odds = 1.386;
  double miss_log_odds = -1.386;
  double p_min = 0.02;
  double p_max = 0.98;
};

struct WorldConfig {
  std::string name = "custom";
  std::uint64_t seed = 42;
  double size_x = 20.0, size_y = 20.0;
  double resolution = 0.1;
  std::vector<Bump> bumps;
  std::vector<Ramp> ramps;
  RandomFeatures random;
  std::vector<BoxObstacle> boxes;
  std::vector<RingObstacle> rings;
  int landmark_count = 0;
  double landmark_face_fraction = 0.8;  ///< share placed on tall obstacle faces
  double landmark_sigma = kDefaultLandmarkSigma;
  std::vector<Landmark> explicit_landmarks;
  SensorConfig sensors;
  RobotConfig robot;
  SurrogateConfig surrogate;
  OccupancyUpdateConfig occupancy;
  TraversabilityParams traversability;
  std::vector<double> boundary;  ///< optional [min_x, min_y, max_x, max_y]
};

/// Parses the JSON world document. Throws ConfigError on malformed input.
WorldConfig parse_world_config(const std::string& json_text);
WorldConfig load_world_config(const std::filesystem::path& path);

/// Built-in presets: flat_office, ramp_yard, obstacle_ring.
WorldConfig preset_world(const std::string& name);
std::vector<std::string> preset_names();

struct World {
  WorldConfig config;
  GridSpec spec;
  std::vector<Bump> bumps;  ///< explicit and generated
  std::vector<Ramp> ramps;
  std::vector<BoxObstacle> boxes;
  std::vector<RingObstacle> rings;
  std::vector<Landmark> landmarks;
  ExplorationBoundary boundary;
  /// 1 where an obstacle taller than the sensor covers the cell center.
  Grid<std::uint8_t> tall_obstacle;

  /// Bare terrain elevation.
  [[nodiscard]] double terrain_height(double x, double y) const;
  /// Terrain plus the tallest obstacle standing at (x, y).
  [[nodiscard]] double surface_height(double x, double y) const;
  /// Height of the obstacle at (x, y), 0 if none.
  [[nodiscard]] double obstacle_height(double x, double y) const;
};

/// Deterministic in config.seed. Throws ConfigError on invalid configs.
World generate_world(const WorldConfig& config);

// ---------------------------------------------------------------------------
// Mission state

using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct PlanarPose {
  double x = 0.0, y = 0.0, theta = 0.0;
};

/// True pose plus the surrogate localization covariance over
/// (x, y, z, roll, pitch, yaw) perturbations.
struct PoseBelief {
  PlanarPose pose;
  Matrix6d cov = Matrix6d::Zero();
};

struct MetricSample {
  double t = 0.0;
  double trace_cov = 0.0;
  double pct_unexplored = 100.0;
  int n_loop_closures = 0;
  double distance = 0.0;
};

struct LandmarkTrack {
  bool seen = false;
  double first_seen = 0.0;
  double last_seen = 0.0;
};

/// Running check of the covariance update directions.
struct CovarianceAudit {
  std::size_t motion_updates = 0;
  std::size_t measurement_updates = 0;
  std::size_t motion_violations = 0;       ///< trace decreased on a motion step
  std::size_t measurement_violations = 0;  ///< trace grew by more than 1e-12
  double worst_measurement_excess = 0.0;
  double min_eigenvalue = 0.0;             ///< smallest covariance eigenvalue seen
};

struct LoopClosureEvent {
  double t = 0.0;
  double trace_before = 0.0;
  double trace_after = 0.0;
  int landmarks = 0;
};

struct MissionState {
  OccupancyGrid occ;
  Grid<float> log_odds;
  Grid<std::uint8_t> observed;  ///< occupancy cell seen at least once
  TerrainStatsGrid terrain;
  Grid<std::uint8_t> lidar_sampled;
  TraversabilityGrid trav;
  BinaryTraversabilityGrid nav;
  PoseBelief belief;
  Blacklist blacklist;
  double clock = 0.0;
  double distance_traveled = 0.0;
  int n_loop_closures = 0;
  std::vector<LandmarkTrack> landmark_tracks;
  std::vector<std::size_t> known_landmarks;  ///< indices into World::landmarks, in discovery order
  std::vector<LoopClosureEvent> loop_closures;
  std::vector<MetricSample> log;
  CovarianceAudit audit;
  std::size_t cells_in_boundary = 0;
  std::size_t unknown_in_boundary = 0;
  Grid<std::uint8_t> in_boundary;
  double next_sample_time = 0.0;
  Grid<std::uint32_t> scan_mark;  ///< per-scan dedup of camera updates
  std::uint32_t scan_id = 0;
};

struct SimParams {
  double nav_threshold = 0.5;    ///< traversability score needed to be Free
  double sample_period = 5.0;    ///< seconds between logged metric samples during motion
};

/// Robot at the configured start pose with an empty map and zero covariance.
MissionState init_mission(const World& world);

struct SenseResult {
  std::vector<std::size_t> observed_landmarks;  ///< indices into World::landmarks
  std::size_t new_terrain_cells = 0;
};

/// LiDAR terrain sampling within the LiDAR radius, camera occupancy update in
/// the FOV wedge, and detection of landmarks inside the frustum with a clear
/// line of sight, all from the true pose.
SenseResult sense(const World& world, MissionState& state, const SimParams& params = {});

/// Fuses the observed landmarks into the covariance and applies the
/// loop-closure rule. Returns true when a loop closure fired.
bool measurement_update(const World& world, MissionState& state, const std::vector<std::size_t>& observed);

/// Moves the robot along `path` cell by cell, sensing and updating the
/// covariance at every step, then turns to `theta_star` and senses once more.
/// Throws PathBlocked (state reflects the progress so far) when the next
/// path cell is no longer Free.
void execute_path(const World& world, MissionState& state, const Path& path, double theta_star,
                  const SimParams& params = {});

MetricSample record_metrics(MissionState& state);

[[nodiscard]] double pct_unexplored(const MissionState& state);

/// Robot cell in the grid.
Cell robot_cell(const World& world, const MissionState& state);

/// Traversability and occupancy as a complete survey would see them.
struct GroundTruthMaps {
  TraversabilityGrid trav;
  BinaryTraversabilityGrid nav;
  OccupancyGrid occ;
};
GroundTruthMaps survey_world(const World& world, double nav_threshold = 0.5);

}  // namespace fitslam
