#include "fitslam/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "fitslam/ray_walk.hpp"
#include "fitslam_presets.inc"

namespace fitslam {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::pair<double, double> read_range(const json& j, const char* key, std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& r = j.at(key);
  if (r.is_number()) return {r.get<double>(), r.get<double>()};
  if (!r.is_array() || r.size() != 2) throw ConfigError(std::string("'") + key + "' must be [min, max]");
  const double lo = r[0].get<double>(), hi = r[1].get<double>();
  if (lo > hi) throw ConfigError(std::string("'") + key + "' has min > max");
  return {lo, hi};
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_terrain(const json& t, WorldConfig& cfg) {
  if (t.contains("bumps")) {
    for (const json& b : t.at("bumps")) {
      cfg.bumps.push_back(Bump{b.at("x").get<double>(), b.at("y").get<double>(), b.at("amplitude").get<double>(),
                               b.at("sigma").get<double>()});
    }
  }
  if (t.contains("ramps")) {
    for (const json& r : t.at("ramps")) {
      cfg.ramps.push_back(Ramp{deg2rad(r.at("heading_deg").get<double>()), r.at("start").get<double>(),
                               r.at("end").get<double>(), r.at("rise").get<double>()});
    }
  }
  if (t.contains("random")) {
    const json& r = t.at("random");
    RandomFeatures& f = cfg.random;
    read_opt(r, "bumps", f.bumps);
    std::tie(f.bump_amplitude_min, f.bump_amplitude_max) =
        read_range(r, "bump_amplitude", {f.bump_amplitude_min, f.bump_amplitude_max});
    std::tie(f.bump_sigma_min, f.bump_sigma_max) = read_range(r, "bump_sigma", {f.bump_sigma_min, f.bump_sigma_max});
    read_opt(r, "mounds", f.mounds);
    std::tie(f.mound_amplitude_min, f.mound_amplitude_max) =
        read_range(r, "mound_amplitude", {f.mound_amplitude_min, f.mound_amplitude_max});
    std::tie(f.mound_sigma_min, f.mound_sigma_max) =
        read_range(r, "mound_sigma", {f.mound_sigma_min, f.mound_sigma_max});
    read_opt(r, "ramps", f.ramps);
    std::tie(f.ramp_rise_min, f.ramp_rise_max) = read_range(r, "ramp_rise", {f.ramp_rise_min, f.ramp_rise_max});
    std::tie(f.ramp_run_min, f.ramp_run_max) = read_range(r, "ramp_run", {f.ramp_run_min, f.ramp_run_max});
  }
}

void parse_obstacles(const json& obstacles, WorldConfig& cfg) {
  for (const json& o : obstacles) {
    const std::string type = o.at("type").get<std::string>();
    if (type == "box") {
      BoxObstacle b;
      if (o.contains("center")) {
        const double cx = o.at("center")[0].get<double>(), cy = o.at("center")[1].get<double>();
        const double sx = o.at("size")[0].get<double>(), sy = o.at("size")[1].get<double>();
        b = BoxObstacle{cx - 0.5 * sx, cy - 0.5 * sy, cx + 0.5 * sx, cy + 0.5 * sy, 1.0};
      } else {
        b = BoxObstacle{o.at("min")[0].get<double>(), o.at("min")[1].get<double>(), o.at("max")[0].get<double>(),
                        o.at("max")[1].get<double>(), 1.0};
      }
      b.height = o.at("height").get<double>();
      if (!(b.max_x > b.min_x && b.max_y > b.min_y && b.height > 0.0)) throw ConfigError("degenerate box obstacle");
      cfg.boxes.push_back(b);
    } else if (type == "ring") {
      RingObstacle r{o.at("center")[0].get<double>(), o.at("center")[1].get<double>(),
                     o.at("inner_radius").get<double>(), o.at("outer_radius").get<double>(),
                     o.at("height").get<double>()};
      if (!(r.outer_radius > r.inner_radius && r.inner_radius >= 0.0 && r.height > 0.0)) {
        throw ConfigError("degenerate ring obstacle");
      }
      cfg.rings.push_back(r);
    } else if (type == "random_boxes") {
      RandomFeatures& f = cfg.random;
      f.boxes = o.at("count").get<int>();
      std::tie(f.box_length_min, f.box_length_max) = read_range(o, "length", {f.box_length_min, f.box_length_max});
      std::tie(f.box_width_min, f.box_width_max) = read_range(o, "width", {f.box_width_min, f.box_width_max});
      std::tie(f.box_height_min, f.box_height_max) = read_range(o, "height", {f.box_height_min, f.box_height_max});
      read_opt(o, "keep_out_radius", f.keep_out_radius);
    } else {
      throw ConfigError("unknown obstacle type '" + type + "'");
    }
  }
}

void parse_landmarks(const json& l, WorldConfig& cfg) {
  if (l.is_number_integer()) {
    cfg.landmark_count = l.get<int>();
    return;
  }
  read_opt(l, "count", cfg.landmark_count);
  read_opt(l, "face_fraction", cfg.landmark_face_fraction);
  read_opt(l, "sigma", cfg.landmark_sigma);
  if (l.contains("explicit")) {
    for (const json& p : l.at("explicit")) {
      if (!p.is_array() || p.size() != 3) throw ConfigError("explicit landmarks must be [x, y, z]");
      Landmark lm;
      lm.position = Eigen::Vector3d(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      lm.covariance = Eigen::Matrix3d::Identity() * (cfg.landmark_sigma * cfg.landmark_sigma);
      cfg.explicit_landmarks.push_back(lm);
    }
  }
}

void apply_document(const json& doc, WorldConfig& cfg) {
  read_opt(doc, "name", cfg.name);
  read_opt(doc, "seed", cfg.seed);
  if (doc.contains("size_m")) {
    const json& s = doc.at("size_m");
    if (s.is_number()) {
      cfg.size_x = cfg.size_y = s.get<double>();
    } else {
      cfg.size_x = s.at(0).get<double>();
      cfg.size_y = s.at(1).get<double>();
    }
  }
  read_opt(doc, "resolution", cfg.resolution);
  if (doc.contains("terrain")) parse_terrain(doc.at("terrain"), cfg);
  if (doc.contains("obstacles")) parse_obstacles(doc.at("obstacles"), cfg);
  if (doc.contains("landmarks")) parse_landmarks(doc.at("landmarks"), cfg);
  if (doc.contains("sensors")) {
    const json& s = doc.at("sensors");
    if (s.contains("fov_deg")) cfg.sensors.fov = deg2rad(s.at("fov_deg").get<double>());
    read_opt(s, "max_depth_m", cfg.sensors.max_depth);
    read_opt(s, "lidar_radius_m", cfg.sensors.lidar_radius);
    read_opt(s, "sensor_height_m", cfg.sensors.sensor_height);
  }
  if (doc.contains("robot")) {
    const json& r = doc.at("robot");
    if (r.contains("start_xy_theta")) {
      const json& p = r.at("start_xy_theta");
      if (!p.is_array() || p.size() != 3) throw ConfigError("start_xy_theta must be [x, y, theta]");
      cfg.robot.start_x = p[0].get<double>();
      cfg.robot.start_y = p[1].get<double>();
      cfg.robot.start_theta = p[2].get<double>();
    }
    read_opt(r, "speed", cfg.robot.speed);
    read_opt(r, "turn_rate", cfg.robot.turn_rate);
  }
  if (doc.contains("surrogate")) {
    const json& s = doc.at("surrogate");
    read_opt(s, "q", cfg.surrogate.q);
    read_opt(s, "kappa", cfg.surrogate.kappa);
    read_opt(s, "T_lc", cfg.surrogate.t_lc);
    read_opt(s, "L", cfg.surrogate.min_revisits);
    read_opt(s, "bearing_sigma", cfg.surrogate.bearing_sigma);
  }
  if (doc.contains("traversability")) {
    const json& t = doc.at("traversability");
    if (t.contains("max_slope_deg")) cfg.traversability.max_slope = deg2rad(t.at("max_slope_deg").get<double>());
    read_opt(t, "max_roughness_m", cfg.traversability.max_roughness);
    read_opt(t, "max_step_m", cfg.traversability.max_step);
    read_opt(t, "min_points", cfg.traversability.min_points);
  }
  if (doc.contains("boundary")) {
    cfg.boundary = doc.at("boundary").get<std::vector<double>>();
    if (cfg.boundary.size() != 4) throw ConfigError("boundary must be [min_x, min_y, max_x, max_y]");
  }
}

WorldConfig parse_document(const json& doc) {
  WorldConfig cfg;
  if (doc.contains("preset")) cfg = preset_world(doc.at("preset").get<std::string>());
  apply_document(doc, cfg);
  return cfg;
}

}  // namespace

WorldConfig parse_world_config(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw ConfigError("world config must be a JSON object");
    return parse_document(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("world config: ") + e.what());
  }
}

WorldConfig load_world_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open world config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_world_config(ss.str());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresetWorlds) names.emplace_back(p.name);
  return names;
}

WorldConfig preset_world(const std::string& name) {
  for (const auto& p : kPresetWorlds) {
    if (name == p.name) return parse_world_config(std::string(p.json));
  }
  throw ConfigError("unknown preset world '" + name + "'");
}

// ---------------------------------------------------------------------------
// World geometry

double World::terrain_height(double x, double y) const {
  double z = 0.0;
  for (const Bump& b : bumps) {
    const double dx = x - b.x, dy = y - b.y;
    z += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
  }
  for (const Ramp& r : ramps) {
    const double s = x * std::cos(r.heading) + y * std::sin(r.heading);
    z += r.rise * std::clamp((s - r.start) / (r.end - r.start), 0.0, 1.0);
  }
  return z;
}

double World::obstacle_height(double x, double y) const {
  double h = 0.0;
  for (const BoxObstacle& b : boxes) {
    if (x >= b.min_x && x < b.max_x && y >= b.min_y && y < b.max_y) h = std::max(h, b.height);
  }
  for (const RingObstacle& r : rings) {
    const double d = std::hypot(x - r.cx, y - r.cy);
    if (d >= r.inner_radius && d < r.outer_radius) h = std::max(h, r.height);
  }
  return h;
}

double World::surface_height(double x, double y) const { return terrain_height(x, y) + obstacle_height(x, y); }

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool boxes_overlap(const BoxObstacle& a, const BoxObstacle& b, double clearance) {
  return a.min_x - clearance < b.max_x && b.min_x - clearance < a.max_x && a.min_y - clearance < b.max_y &&
         b.min_y - clearance < a.max_y;
}

double box_distance(const BoxObstacle& b, double x, double y) {
  const double dx = std::max({b.min_x - x, 0.0, x - b.max_x});
  const double dy = std::max({b.min_y - y, 0.0, y - b.max_y});
  return std::hypot(dx, dy);
}

void validate_config(const WorldConfig& cfg) {
  if (!(cfg.size_x > 0.0 && cfg.size_y > 0.0)) throw ConfigError("world size must be positive");
  if (!(cfg.resolution > 0.0)) throw ConfigError("resolution must be positive");
  if (!(cfg.sensors.fov > 0.0 && cfg.sensors.fov <= 2.0 * std::numbers::pi)) throw ConfigError("fov out of range");
  if (!(cfg.sensors.max_depth > 0.0 && cfg.sensors.lidar_radius > 0.0)) throw ConfigError("sensor ranges must be > 0");
  if (!(cfg.robot.speed > 0.0 && cfg.robot.turn_rate > 0.0)) throw ConfigError("robot speeds must be > 0");
  if (!(cfg.surrogate.q >= 0.0 && cfg.surrogate.kappa > 0.0 && cfg.surrogate.kappa <= 1.0)) {
    throw ConfigError("surrogate q must be >= 0 and kappa in (0, 1]");
  }
  if (cfg.surrogate.min_revisits < 1 || !(cfg.surrogate.t_lc >= 0.0)) throw ConfigError("invalid loop-closure rule");
  if (cfg.landmark_count < 0) throw ConfigError("landmark count must be >= 0");
  if (!(cfg.landmark_face_fraction >= 0.0 && cfg.landmark_face_fraction <= 1.0)) {
    throw ConfigError("landmark face_fraction must be in [0, 1]");
  }
}

void place_random_features(const WorldConfig& cfg, World& w, std::mt19937_64& rng) {
  const RandomFeatures& f = cfg.random;
  const double sx = cfg.size_x, sy = cfg.size_y;
  const double start_x = cfg.robot.start_x, start_y = cfg.robot.start_y;

  for (int k = 0; k < f.ramps; ++k) {
    const double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    // Projection of the world rectangle on the ramp direction.
    const double c = std::cos(heading), s = std::sin(heading);
    const double proj[4] = {0.0, sx * c, sy * s, sx * c + sy * s};
    const double lo = *std::min_element(proj, proj + 4), hi = *std::max_element(proj, proj + 4);
    const double run = uniform(rng, f.ramp_run_min, f.ramp_run_max);
    const double start = uniform(rng, lo, std::max(lo, hi - run));
    w.ramps.push_back(Ramp{heading, start, start + run, uniform(rng, f.ramp_rise_min, f.ramp_rise_max)});
  }
  for (int k = 0; k < f.bumps; ++k) {
    w.bumps.push_back(Bump{uniform(rng, 0.0, sx), uniform(rng, 0.0, sy),
                           uniform(rng, f.bump_amplitude_min, f.bump_amplitude_max),
                           uniform(rng, f.bump_sigma_min, f.bump_sigma_max)});
  }
  for (int k = 0; k < f.mounds; ++k) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double sigma = uniform(rng, f.mound_sigma_min, f.mound_sigma_max);
      const Bump b{uniform(rng, 0.0, sx), uniform(rng, 0.0, sy), uniform(rng, f.mound_amplitude_min, f.mound_amplitude_max),
                   sigma};
      if (std::hypot(b.x - start_x, b.y - start_y) < f.keep_out_radius + 3.0 * sigma) continue;
      w.bumps.push_back(b);
      break;
    }
  }
  for (int k = 0; k < f.boxes; ++k) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double length = uniform(rng, f.box_length_min, f.box_length_max);
      const double width = uniform(rng, f.box_width_min, f.box_width_max);
      const bool along_x = uniform(rng, 0.0, 1.0) < 0.5;
      const double ex = along_x ? length : width, ey = along_x ? width : length;
      const double cx = uniform(rng, 1.0 + 0.5 * ex, sx - 1.0 - 0.5 * ex);
      const double cy = uniform(rng, 1.0 + 0.5 * ey, sy - 1.0 - 0.5 * ey);
      const double height = uniform(rng, f.box_height_min, f.box_height_max);
      const BoxObstacle b{cx - 0.5 * ex, cy - 0.5 * ey, cx + 0.5 * ex, cy + 0.5 * ey, height};
      if (box_distance(b, start_x, start_y) < f.keep_out_radius) continue;
      const bool clash = std::any_of(w.boxes.begin(), w.boxes.end(),
                                     [&](const BoxObstacle& o) { return boxes_overlap(b, o, 1.5); });
      if (clash) continue;
      w.boxes.push_back(b);
      break;
    }
  }
}

void place_landmarks(const WorldConfig& cfg, World& w, std::mt19937_64& rng) {
  const Eigen::Matrix3d cov = Eigen::Matrix3d::Identity() * (cfg.landmark_sigma * cfg.landmark_sigma);
  w.landmarks = cfg.explicit_landmarks;
  if (cfg.landmark_count == 0) return;

  std::vector<const BoxObstacle*> faces;
  std::vector<double> perimeter;
  for (const BoxObstacle& b : w.boxes) {
    if (b.height <= cfg.sensors.sensor_height) continue;
    faces.push_back(&b);
    perimeter.push_back(2.0 * ((b.max_x - b.min_x) + (b.max_y - b.min_y)));
  }
  const int on_faces =
      faces.empty() ? 0 : static_cast<int>(std::lround(cfg.landmark_face_fraction * cfg.landmark_count));
  constexpr double kOffset = 0.05;

  auto free_spot = [&](double x, double y) {
    return w.boundary.contains(x, y) && w.obstacle_height(x, y) == 0.0;
  };

  int placed = 0;
  for (int attempt = 0; placed < on_faces && attempt < 50 * on_faces; ++attempt) {
    std::discrete_distribution<std::size_t> pick(perimeter.begin(), perimeter.end());
    const BoxObstacle& b = *faces[pick(rng)];
    const double lx = b.max_x - b.min_x, ly = b.max_y - b.min_y;
    double s = uniform(rng, 0.0, 2.0 * (lx + ly));
    double x = 0.0, y = 0.0;
    if (s < lx) {
      x = b.min_x + s, y = b.min_y - kOffset;
    } else if ((s -= lx) < ly) {
      x = b.max_x + kOffset, y = b.min_y + s;
    } else if ((s -= ly) < lx) {
      x = b.max_x - s, y = b.max_y + kOffset;
    } else {
      s -= lx;
      x = b.min_x - kOffset, y = b.max_y - s;
    }
    if (!free_spot(x, y)) continue;
    Landmark lm;
    lm.position = Eigen::Vector3d(x, y, w.terrain_height(x, y) + uniform(rng, 0.2, std::min(b.height, 1.5)));
    lm.covariance = cov;
    w.landmarks.push_back(lm);
    ++placed;
  }

  // The rest sit on terrain features (rocks, posts), preferably near hills.
  const int rest = cfg.landmark_count - placed;
  int added = 0;
  for (int attempt = 0; added < rest && attempt < 50 * rest; ++attempt) {
    double x = 0.0, y = 0.0;
    if (!w.bumps.empty() && uniform(rng, 0.0, 1.0) < 0.5) {
      const Bump& b = w.bumps[std::uniform_int_distribution<std::size_t>(0, w.bumps.size() - 1)(rng)];
      x = b.x + uniform(rng, -1.5, 1.5) * b.sigma;
      y = b.y + uniform(rng, -1.5, 1.5) * b.sigma;
    } else {
      x = uniform(rng, 0.0, cfg.size_x);
      y = uniform(rng, 0.0, cfg.size_y);
    }
    if (!free_spot(x, y)) continue;
    Landmark lm;
    lm.position = Eigen::Vector3d(x, y, w.terrain_height(x, y) + uniform(rng, 0.05, 0.6));
    lm.covariance = cov;
    w.landmarks.push_back(lm);
    ++added;
  }
}

}  // namespace

World generate_world(const WorldConfig& config) {
  validate_config(config);
  World w;
  w.config = config;
  w.spec = GridSpec{0.0, 0.0, config.resolution, static_cast<int>(std::lround(config.size_x / config.resolution)),
                    static_cast<int>(std::lround(config.size_y / config.resolution))};
  w.spec.validate();
  if (config.boundary.empty()) {
    w.boundary = ExplorationBoundary{0.0, 0.0, config.size_x, config.size_y};
  } else {
    w.boundary = ExplorationBoundary{config.boundary[0], config.boundary[1], config.boundary[2], config.boundary[3]};
  }
  if (!w.boundary.contains(config.robot.start_x, config.robot.start_y) ||
      !w.spec.contains(config.robot.start_x, config.robot.start_y)) {
    throw ConfigError("robot start pose lies outside the exploration boundary");
  }

  w.bumps = config.bumps;
  w.ramps = config.ramps;
  w.boxes = config.boxes;
  w.rings = config.rings;
  std::mt19937_64 rng(config.seed);
  place_random_features(config, w, rng);
  if (w.obstacle_height(config.robot.start_x, config.robot.start_y) > 0.0) {
    throw ConfigError("robot start pose lies inside an obstacle");
  }
  place_landmarks(config, w, rng);

  w.tall_obstacle = Grid<std::uint8_t>(w.spec, 0);
  for (int j = 0; j < w.spec.height; ++j) {
    for (int i = 0; i < w.spec.width; ++i) {
      const Point2 c = cell_to_world(w.spec, i, j);
      w.tall_obstacle(Cell{i, j}) = w.obstacle_height(c.x, c.y) > config.sensors.sensor_height ? 1 : 0;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Sensing and the surrogate localization model

MissionState init_mission(const World& world) {
  const GridSpec& spec = world.spec;
  MissionState s;
  s.occ = OccupancyGrid(spec);
  s.log_odds = Grid<float>(spec, 0.0f);
  s.observed = Grid<std::uint8_t>(spec, 0);
  s.terrain = TerrainStatsGrid(spec);
  s.lidar_sampled = Grid<std::uint8_t>(spec, 0);
  s.trav = TraversabilityGrid(spec, std::nullopt);
  s.nav = BinaryTraversabilityGrid(spec, NavState::Unknown);
  s.belief.pose = PlanarPose{world.config.robot.start_x, world.config.robot.start_y, world.config.robot.start_theta};
  s.landmark_tracks.assign(world.landmarks.size(), LandmarkTrack{});
  s.in_boundary = Grid<std::uint8_t>(spec, 0);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      if (world.boundary.contains(spec, Cell{i, j})) {
        s.in_boundary(Cell{i, j}) = 1;
        ++s.cells_in_boundary;
      }
    }
  }
  s.unknown_in_boundary = s.cells_in_boundary;
  s.scan_mark = Grid<std::uint32_t>(spec, 0);
  return s;
}

Cell robot_cell(const World& world, const MissionState& state) {
  return world_to_cell(world.spec, state.belief.pose.x, state.belief.pose.y);
}

namespace {

// Nine points on a 3x3 pattern inside the cell, lifted onto the true surface.
void sample_cell_points(const World& world, Cell c, std::vector<TerrainPoint>& out) {
  const Point2 center = cell_to_world(world.spec, c);
  const double d = world.spec.resolution / 3.0;
  for (int b = -1; b <= 1; ++b) {
    for (int a = -1; a <= 1; ++a) {
      const double x = center.x + a * d, y = center.y + b * d;
      out.push_back(TerrainPoint{x, y, world.surface_height(x, y)});
    }
  }
}

std::size_t lidar_update(const World& world, MissionState& state, const SimParams& params) {
  const GridSpec& spec = world.spec;
  const double r = world.config.sensors.lidar_radius;
  const double px = state.belief.pose.x, py = state.belief.pose.y;
  const Cell lo = world_to_cell_unchecked(spec, px - r, py - r);
  const Cell hi = world_to_cell_unchecked(spec, px + r, py + r);
  std::vector<Cell> fresh;
  std::vector<TerrainPoint> points;
  const double r2 = r * r;
  for (int j = std::max(lo.j, 0); j <= std::min(hi.j, spec.height - 1); ++j) {
    const double cy = spec.origin_y + (j + 0.5) * spec.resolution - py;
    for (int i = std::max(lo.i, 0); i <= std::min(hi.i, spec.width - 1); ++i) {
      const Cell c{i, j};
      if (state.lidar_sampled(c)) continue;
      const double cx = spec.origin_x + (i + 0.5) * spec.resolution - px;
      if (cx * cx + cy * cy > r2) continue;
      state.lidar_sampled(c) = 1;
      fresh.push_back(c);
      sample_cell_points(world, c, points);
    }
  }
  if (fresh.empty()) return 0;
  accumulate_points(state.terrain, points);
  rescore_cells(state.terrain, world.config.traversability, state.trav, fresh);
  threshold_cells(state.trav, params.nav_threshold, state.nav, fresh);
  return fresh.size();
}

double logit(double p) { return std::log(p / (1.0 - p)); }

void camera_update(const World& world, MissionState& state) {
  const GridSpec& spec = world.spec;
  const SensorConfig& sensors = world.config.sensors;
  const OccupancyUpdateConfig& occ_cfg = world.config.occupancy;
  const Point2 origin{state.belief.pose.x, state.belief.pose.y};
  const auto lo_clamp = static_cast<float>(logit(occ_cfg.p_min));
  const auto hi_clamp = static_cast<float>(logit(occ_cfg.p_max));

  if (++state.scan_id == 0) {
    std::fill(state.scan_mark.data().begin(), state.scan_mark.data().end(), 0u);
    state.scan_id = 1;
  }
  const std::uint32_t scan = state.scan_id;

  // Rays close enough that neighbors are half a cell apart at full depth.
  const int rays = std::max(2, static_cast<int>(std::ceil(sensors.fov * sensors.max_depth / (0.5 * spec.resolution))) + 1);
  const double first = state.belief.pose.theta - 0.5 * sensors.fov;
  const double step = sensors.fov / (rays - 1);

  auto update = [&](Cell c, bool hit) {
    const std::size_t idx = spec.index(c);
    if (state.scan_mark[idx] == scan) return;
    state.scan_mark[idx] = scan;
    float& l = state.log_odds[idx];
    l = std::clamp(l + static_cast<float>(hit ? occ_cfg.hit_log_odds : occ_cfg.miss_log_odds), lo_clamp, hi_clamp);
    double p = 1.0 / (1.0 + std::exp(-static_cast<double>(l)));
    // An observed cell never reads as Unknown again.
    if (p == kUnknownProbability) p = std::nextafter(kUnknownProbability, hit ? 1.0 : 0.0);
    state.occ[idx] = p;
    if (!state.observed[idx]) {
      state.observed[idx] = 1;
      if (state.in_boundary[idx]) --state.unknown_in_boundary;
    }
  };

  for (int k = 0; k < rays; ++k) {
    walk_ray(spec, origin, first + k * step, sensors.max_depth, [&](Cell c, double) {
      const bool hit = world.tall_obstacle(c) != 0;
      update(c, hit);
      return !hit;
    });
  }
}

CameraPose true_camera(const World& world, const MissionState& state) {
  const PlanarPose& p = state.belief.pose;
  const SensorConfig& s = world.config.sensors;
  return camera_pose_from_heading(p.x, p.y, world.terrain_height(p.x, p.y) + s.sensor_height, p.theta, s.fov,
                                  s.max_depth);
}

// No tall obstacle cell between the camera and the landmark's cell.
bool line_of_sight(const World& world, Point2 eye, const Eigen::Vector3d& target) {
  const double dx = target.x() - eye.x, dy = target.y() - eye.y;
  const Cell goal = world_to_cell_unchecked(world.spec, target.x(), target.y());
  bool clear = true;
  walk_ray(world.spec, eye, std::atan2(dy, dx), std::hypot(dx, dy), [&](Cell c, double) {
    if (c == goal) return false;
    if (world.tall_obstacle(c)) clear = false;
    return clear;
  });
  return clear;
}

void audit_eigenvalues(MissionState& state) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> eig(state.belief.cov, Eigen::EigenvaluesOnly);
  state.audit.min_eigenvalue = std::min(state.audit.min_eigenvalue, eig.eigenvalues().minCoeff());
}

}  // namespace

SenseResult sense(const World& world, MissionState& state, const SimParams& params) {
  SenseResult result;
  result.new_terrain_cells = lidar_update(world, state, params);
  camera_update(world, state);
  const CameraPose cam = true_camera(world, state);
  const Point2 eye{state.belief.pose.x, state.belief.pose.y};
  for (std::size_t k = 0; k < world.landmarks.size(); ++k) {
    if (!visible(cam, world.landmarks[k])) continue;
    if (line_of_sight(world, eye, world.landmarks[k].position)) result.observed_landmarks.push_back(k);
  }
  return result;
}

bool measurement_update(const World& world, MissionState& state, const std::vector<std::size_t>& observed) {
  if (observed.empty()) return false;
  const SurrogateConfig& sur = world.config.surrogate;
  const CameraPose cam = true_camera(world, state);
  FimParams fim;
  fim.bearing_sigma = sur.bearing_sigma;

  Matrix6d info = Matrix6d::Zero();
  for (std::size_t k : observed) info += landmark_fim(cam, world.landmarks[k], fim);

  // cov' = (cov^-1 + info)^-1 in the form cov - cov L (I + L^T cov L)^-1 L^T cov
  // with info = L L^T; the subtracted term is a Gram matrix, so the trace
  // cannot grow and a singular cov needs no inverse.
  Matrix6d& cov = state.belief.cov;
  const double trace_before = cov.trace();
  Eigen::SelfAdjointEigenSolver<Matrix6d> eig(0.5 * (info + info.transpose()));
  const Eigen::Matrix<double, 6, 1> root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix6d l = eig.eigenvectors() * root.asDiagonal();
  const Matrix6d a = cov * l;
  const Matrix6d m = Matrix6d::Identity() + l.transpose() * a;
  Eigen::LLT<Matrix6d> llt(0.5 * (m + m.transpose()));
  const Matrix6d x = llt.matrixL().solve(a.transpose());
  cov = cov - x.transpose() * x;
  cov = 0.5 * (cov + cov.transpose());

  ++state.audit.measurement_updates;
  const double excess = cov.trace() - trace_before;
  if (excess > 1e-12) {
    ++state.audit.measurement_violations;
  }
  state.audit.worst_measurement_excess = std::max(state.audit.worst_measurement_excess, excess);

  int revisits = 0;
  for (std::size_t k : observed) {
    const LandmarkTrack& t = state.landmark_tracks[k];
    if (t.seen && state.clock - t.first_seen > sur.t_lc) ++revisits;
  }
  bool closed = false;
  if (revisits >= sur.min_revisits) {
    const double before = cov.trace();
    cov *= sur.kappa;
    ++state.n_loop_closures;
    state.loop_closures.push_back(LoopClosureEvent{state.clock, before, cov.trace(), revisits});
    closed = true;
  }
  for (std::size_t k : observed) {
    LandmarkTrack& t = state.landmark_tracks[k];
    if (!t.seen) {
      t.seen = true;
      t.first_seen = state.clock;
      state.known_landmarks.push_back(k);
    }
    t.last_seen = state.clock;
  }
  audit_eigenvalues(state);
  return closed;
}

double pct_unexplored(const MissionState& state) {
  if (state.cells_in_boundary == 0) return 0.0;
  return 100.0 * static_cast<double>(state.unknown_in_boundary) / static_cast<double>(state.cells_in_boundary);
}

MetricSample record_metrics(MissionState& state) {
  MetricSample s{state.clock, state.belief.cov.trace(), pct_unexplored(state), state.n_loop_closures,
                 state.distance_traveled};
  state.log.push_back(s);
  return s;
}

void execute_path(const World& world, MissionState& state, const Path& path, double theta_star,
                  const SimParams& params) {
  if (path.cells.empty()) throw ConfigError("cannot execute an empty path");
  if (!(path.cells.front() == robot_cell(world, state))) throw ConfigError("path does not start at the robot cell");
  const GridSpec& spec = world.spec;
  const RobotConfig& robot = world.config.robot;
  const double q = world.config.surrogate.q;
  Matrix6d growth = Matrix6d::Zero();
  growth.diagonal() << 1.0, 1.0, 0.1, 0.1, 0.1, 1.0;

  auto maybe_sample = [&] {
    if (state.clock >= state.next_sample_time) {
      record_metrics(state);
      state.next_sample_time = state.clock + params.sample_period;
    }
  };

  for (std::size_t k = 1; k < path.cells.size(); ++k) {
    const Cell next = path.cells[k];
    if (state.nav(next) != NavState::Free) throw PathBlocked("path cell became non-traversable");
    const Point2 target = cell_to_world(spec, next);
    PlanarPose& pose = state.belief.pose;
    const double dx = target.x - pose.x, dy = target.y - pose.y;
    const double dist = std::hypot(dx, dy);
    const double heading = std::atan2(dy, dx);
    state.clock += std::abs(wrap_angle(heading - pose.theta)) / robot.turn_rate + dist / robot.speed;
    state.distance_traveled += dist;
    pose = PlanarPose{target.x, target.y, heading};

    const double trace_before = state.belief.cov.trace();
    state.belief.cov += (q * dist) * growth;
    ++state.audit.motion_updates;
    if (state.belief.cov.trace() < trace_before) ++state.audit.motion_violations;

    const SenseResult seen = sense(world, state, params);
    measurement_update(world, state, seen.observed_landmarks);
    maybe_sample();
  }

  PlanarPose& pose = state.belief.pose;
  state.clock += std::abs(wrap_angle(theta_star - pose.theta)) / robot.turn_rate;
  pose.theta = wrap_angle(theta_star);
  const SenseResult seen = sense(world, state, params);
  measurement_update(world, state, seen.observed_landmarks);
  record_metrics(state);
  state.next_sample_time = state.clock + params.sample_period;
}

GroundTruthMaps survey_world(const World& world, double nav_threshold) {
  const GridSpec& spec = world.spec;
  TerrainStatsGrid stats(spec);
  std::vector<TerrainPoint> points;
  points.reserve(spec.size() * 9);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) sample_cell_points(world, Cell{i, j}, points);
  }
  accumulate_points(stats, points);
  GroundTruthMaps maps;
  maps.trav = score_cells(stats, world.config.traversability);
  maps.nav = threshold(maps.trav, nav_threshold);
  maps.occ = OccupancyGrid(spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    maps.occ[k] = world.tall_obstacle[k] ? world.config.occupancy.p_max : world.config.occupancy.p_min;
  }
  return maps;
}

}  // namespace fitslam
