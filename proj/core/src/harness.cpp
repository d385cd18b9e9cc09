#include "fitslam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "fitslam/plot.hpp"
#include "fitslam/raster_io.hpp"

namespace fitslam {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::FitSlam: return "fit";
    case Strategy::Greedy: return "greedy";
    case Strategy::Random: return "random";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "fit" || name == "fitslam") return Strategy::FitSlam;
  if (name == "greedy") return Strategy::Greedy;
  if (name == "random") return Strategy::Random;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Complete: return "complete";
    case Termination::Stalled: return "stalled";
    case Termination::TimeLimit: return "time_limit";
    case Termination::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

void MissionConfig::validate() const {
  utility.validate();
  if (max_cluster_size < 1) throw ConfigError("max_cluster_size must be >= 1");
  if (!(max_mission_time > 0.0)) throw ConfigError("max_mission_time must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(voxel_size > 0.0)) throw ConfigError("voxel_size must be positive");
  if (!(waypoint_spacing >= 0.0)) throw ConfigError("waypoint_spacing must be >= 0");
  if (!(sim.sample_period > 0.0)) throw ConfigError("sample_period must be positive");
}

namespace {

class Mission {
 public:
  Mission(const World& world, Strategy strategy, std::uint64_t seed, const MissionConfig& config)
      : world_(world), strategy_(strategy), config_(config), state_(init_mission(world)),
        rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
    raycast_ = config.raycast;
    raycast_.fov = world.config.sensors.fov;
    raycast_.max_range = world.config.sensors.max_depth;
    raycast_.validate();
    path_params_.sensor_height = world.config.sensors.sensor_height;
    path_params_.fov = world.config.sensors.fov;
    path_params_.max_depth = world.config.sensors.max_depth;
    path_params_.fim.bearing_sigma = world.config.surrogate.bearing_sigma;
    spacing_ = config.waypoint_spacing > 0.0 ? config.waypoint_spacing : world.config.sensors.max_depth;
    result_.strategy = strategy;
    result_.seed = seed;
  }

  MissionResult run() {
    const SenseResult first = sense(world_, state_, config_.sim);
    measurement_update(world_, state_, first.observed_landmarks);
    record_metrics(state_);
    state_.next_sample_time = config_.sim.sample_period;

    result_.reason = Termination::IterationLimit;
    for (int it = 0; it < config_.max_iterations; ++it) {
      result_.iterations = it + 1;
      if (const auto done = step(it)) {
        result_.reason = *done;
        break;
      }
      if (state_.clock >= config_.max_mission_time) {
        result_.reason = Termination::TimeLimit;
        break;
      }
    }
    if (state_.log.empty() || state_.log.back().t != state_.clock) record_metrics(state_);
    result_.log = std::move(state_.log);
    result_.loop_closures = std::move(state_.loop_closures);
    result_.audit = state_.audit;
    result_.blacklisted = state_.blacklist.size();
    return std::move(result_);
  }

 private:
  // One decide-and-move cycle; returns a termination reason when the mission ends.
  std::optional<Termination> step(int iteration) {
    const std::vector<Cell> frontier = detect_frontiers(state_.occ, state_.nav, world_.boundary);
    const std::vector<FrontierCluster> clusters =
        cluster_frontiers(world_.spec, frontier, config_.max_cluster_size, state_.blacklist);
    if (mission_complete(clusters)) return Termination::Complete;

    const Cell start = robot_cell(world_, state_);
    std::vector<Cell> targets;
    targets.reserve(clusters.size());
    for (const FrontierCluster& c : clusters) targets.push_back(c.candidate);
    const DistanceField field = distance_field(state_.nav, start, targets);

    std::vector<CandidateGoal> candidates;
    for (const FrontierCluster& c : clusters) {
      if (!field.reachable(c.candidate)) {
        state_.blacklist.add(c.candidate);
        continue;
      }
      CandidateGoal g;
      g.cluster = c;
      g.cell = c.candidate;
      g.index = world_.spec.index(c.candidate);
      g.position = cell_to_world(world_.spec, c.candidate);
      g.rho = field.cost(c.candidate);
      candidates.push_back(std::move(g));
    }
    if (candidates.empty()) return Termination::Stalled;

    GoalRecord record;
    record.iteration = iteration;
    record.t = state_.clock;
    record.candidates = candidates.size();
    CandidateGoal goal = select(candidates, start, record);
    if (goal.path.cells.empty()) goal.path = plan(state_.nav, start, goal.cell);
    record.cell = goal.cell;
    record.rho = goal.rho;
    record.theta_star = goal.theta_star;
    result_.goals.push_back(record);

    try {
      execute_path(world_, state_, goal.path, goal.theta_star, config_.sim);
      state_.blacklist.add(goal.cell);
    } catch (const PathBlocked&) {
      ++result_.replans;
    }
    return std::nullopt;
  }

  CandidateGoal select(std::vector<CandidateGoal>& candidates, Cell start, GoalRecord& record) {
    switch (strategy_) {
      case Strategy::FitSlam: return select_fit(candidates, start, record);
      case Strategy::Greedy: {
        auto best = std::min_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
          return a.rho != b.rho ? a.rho < b.rho : a.index < b.index;
        });
        return with_orientation(*best);
      }
      case Strategy::Random: {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return with_orientation(candidates[pick(rng_)]);
      }
    }
    throw ConfigError("unknown strategy");
  }

  CandidateGoal with_orientation(CandidateGoal g) const {
    const OrientationScan scan = scan_orientations(state_.occ, g.position, raycast_);
    g.delta_e = scan.best_gain;
    g.theta_star = scan.best_theta;
    return g;
  }

  CandidateGoal select_fit(std::vector<CandidateGoal>& candidates, Cell start, GoalRecord& record) {
    for (CandidateGoal& g : candidates) g = with_orientation(std::move(g));
    UtilityParams params = config_.utility;
    params.rho_floor = std::max(params.rho_floor, world_.spec.resolution);
    compute_u1(candidates, params);
    std::vector<CandidateGoal> top = shortlist(candidates, params.shortlist_n);

    std::vector<Landmark> known;
    known.reserve(state_.known_landmarks.size());
    for (std::size_t k : state_.known_landmarks) known.push_back(world_.landmarks[k]);
    const VoxelLandmarks voxels = voxelize_landmarks(known, config_.voxel_size);
    const GroundHeight ground = [this](double x, double y) { return mapped_ground(x, y); };

    std::vector<PathInformation> infos;
    infos.reserve(top.size());
    for (CandidateGoal& g : top) {
      g.path = plan(state_.nav, start, g.cell);
      std::vector<Waypoint> wps = sample_waypoints(g.path, world_.spec, spacing_);
      wps.back().heading = g.theta_star;
      infos.push_back(path_information(wps, voxels, path_params_, ground));
    }
    normalize_path_information(infos);
    for (std::size_t k = 0; k < top.size(); ++k) top[k].info = infos[k];
    CandidateGoal best = select_best(top, params);
    record.u1 = best.u1;
    record.u2 = best.u2;
    return best;
  }

  // Mean elevation of the mapped terrain under (x, y); 0 where nothing was sampled.
  double mapped_ground(double x, double y) const {
    const Cell c = world_to_cell_unchecked(world_.spec, x, y);
    if (!world_.spec.contains(c)) return 0.0;
    const CellMoments& m = state_.terrain.moments(c);
    if (m.count == 0) return 0.0;
    return static_cast<double>(m.sz / static_cast<long double>(m.count));
  }

  const World& world_;
  Strategy strategy_;
  MissionConfig config_;
  MissionState state_;
  std::mt19937_64 rng_;
  RayCastParams raycast_;
  PathInformationParams path_params_;
  double spacing_ = 5.0;
  MissionResult result_;
};

}  // namespace

MissionResult run_mission(const World& world, Strategy strategy, std::uint64_t seed, const MissionConfig& config) {
  config.validate();
  return Mission(world, strategy, seed, config).run();
}

std::optional<double> time_to_coverage(const std::vector<MetricSample>& log, double pct) {
  for (const MetricSample& s : log) {
    if (100.0 - s.pct_unexplored >= pct) return s.t;
  }
  return std::nullopt;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool ExperimentResult::any_stalled() const {
  return std::any_of(runs.begin(), runs.end(), [](const MissionResult& r) { return r.reason == Termination::Stalled; });
}

std::string metrics_csv(const std::vector<MetricSample>& log) {
  std::ostringstream o;
  o << "t,trace_cov,pct_unexplored,n_loop_closures,distance\n";
  for (const MetricSample& s : log) {
    o << format_double(s.t) << ',' << format_double(s.trace_cov) << ',' << format_double(s.pct_unexplored) << ','
      << s.n_loop_closures << ',' << format_double(s.distance) << '\n';
  }
  return o.str();
}

std::string summary_csv(const std::vector<StrategySummary>& summary) {
  std::ostringstream o;
  o << "strategy,runs,median_final_trace,median_time_to_90,median_time_to_50,median_loop_closures,"
       "median_final_pct_unexplored,stalled\n";
  for (const StrategySummary& s : summary) {
    o << strategy_name(s.strategy) << ',' << s.runs << ',' << format_double(s.median_final_trace) << ','
      << format_double(s.median_time_to_90) << ',' << format_double(s.median_time_to_50) << ','
      << format_double(s.median_loop_closures) << ',' << format_double(s.median_final_pct_unexplored) << ','
      << s.stalled << '\n';
  }
  return o.str();
}

std::string runs_csv(const std::vector<MissionResult>& runs) {
  std::ostringstream o;
  o << "strategy,seed,reason,final_t,final_trace,final_pct_unexplored,n_loop_closures,distance,goals,blacklisted,"
       "replans\n";
  for (const MissionResult& r : runs) {
    const MetricSample& f = r.final_sample();
    o << strategy_name(r.strategy) << ',' << r.seed << ',' << termination_name(r.reason) << ','
      << format_double(f.t) << ',' << format_double(f.trace_cov) << ',' << format_double(f.pct_unexplored) << ','
      << f.n_loop_closures << ',' << format_double(f.distance) << ',' << r.goals.size() << ',' << r.blacklisted
      << ',' << r.replans << '\n';
  }
  return o.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

constexpr double kInf = std::numeric_limits<double>::infinity();

StrategySummary summarize(Strategy strategy, const std::vector<const MissionResult*>& runs) {
  StrategySummary s;
  s.strategy = strategy;
  s.runs = runs.size();
  std::vector<double> trace, closures, pct, t50, t90;
  for (const MissionResult* r : runs) {
    trace.push_back(r->final_sample().trace_cov);
    closures.push_back(r->final_sample().n_loop_closures);
    pct.push_back(r->final_sample().pct_unexplored);
    t50.push_back(time_to_coverage(r->log, 50.0).value_or(kInf));
    t90.push_back(time_to_coverage(r->log, 90.0).value_or(kInf));
    if (r->reason == Termination::Stalled) ++s.stalled;
  }
  s.median_final_trace = median(trace);
  s.median_loop_closures = median(closures);
  s.median_final_pct_unexplored = median(pct);
  s.median_time_to_50 = median(t50);
  s.median_time_to_90 = median(t90);
  return s;
}

// Median over runs of a sample-and-hold metric on a regular time grid.
PlotSeries median_curve(const std::vector<const MissionResult*>& runs, double t_end, double dt,
                        double MetricSample::*field) {
  PlotSeries s;
  std::vector<std::size_t> cursor(runs.size(), 0);
  for (double t = 0.0; t <= t_end + 1e-9; t += dt) {
    std::vector<double> values;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& log = runs[r]->log;
      while (cursor[r] + 1 < log.size() && log[cursor[r] + 1].t <= t) ++cursor[r];
      values.push_back(log[cursor[r]].*field);
    }
    s.x.push_back(t);
    s.y.push_back(median(values));
  }
  return s;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create " + config.out_dir.string() + ": " + ec.message());
  for (const MissionResult& r : result.runs) {
    const std::string name = "metrics_" + std::string(strategy_name(r.strategy)) + "_" + std::to_string(r.seed) + ".csv";
    write_file(config.out_dir / name, metrics_csv(r.log));
  }
  write_file(config.out_dir / "summary.csv", summary_csv(result.summary));
  write_file(config.out_dir / "runs.csv", runs_csv(result.runs));

  static constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  double t_end = 0.0;
  for (const MissionResult& r : result.runs) t_end = std::max(t_end, r.final_sample().t);
  const double dt = std::max(1.0, t_end / 400.0);
  std::vector<PlotSeries> trace, pct;
  for (std::size_t k = 0; k < config.strategies.size(); ++k) {
    std::vector<const MissionResult*> runs;
    for (const MissionResult& r : result.runs) {
      if (r.strategy == config.strategies[k]) runs.push_back(&r);
    }
    if (runs.empty()) continue;
    const std::string label(strategy_name(config.strategies[k]));
    const std::string color = kColors[k % std::size(kColors)];
    PlotSeries a = median_curve(runs, t_end, dt, &MetricSample::trace_cov);
    a.label = label, a.color = color;
    trace.push_back(std::move(a));
    PlotSeries b = median_curve(runs, t_end, dt, &MetricSample::pct_unexplored);
    b.label = label, b.color = color;
    pct.push_back(std::move(b));
  }
  write_file(config.out_dir / "trace_cov.svg",
             line_chart_svg(trace, {"Localization covariance (median over seeds)", "Time (s)", "trace(cov)"}));
  write_file(config.out_dir / "pct_unexplored.svg",
             line_chart_svg(pct, {"Unexplored map (median over seeds)", "Time (s)", "unexplored (%)"}));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.mission.validate();
  if (config.strategies.empty() || config.seeds.empty()) throw ConfigError("experiment needs strategies and seeds");

  std::vector<World> worlds;
  worlds.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    WorldConfig wc = config.world;
    wc.seed = seed;
    worlds.push_back(generate_world(wc));
  }

  const std::size_t n_seeds = config.seeds.size();
  const std::size_t jobs = config.strategies.size() * n_seeds;
  ExperimentResult result;
  result.runs.resize(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      try {
        const std::size_t s = job % n_seeds;
        result.runs[job] = run_mission(worlds[s], config.strategies[job / n_seeds], config.seeds[s], config.mission);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (Strategy strategy : config.strategies) {
    std::vector<const MissionResult*> runs;
    for (const MissionResult& r : result.runs) {
      if (r.strategy == strategy) runs.push_back(&r);
    }
    result.summary.push_back(summarize(strategy, runs));
  }
  if (!config.out_dir.empty()) write_outputs(config, result);
  return result;
}

}  // namespace fitslam
