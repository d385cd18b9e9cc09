#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fitslam/infogain.hpp"
#include "fitslam/simworld.hpp"
#include "fitslam/utility.hpp"

namespace fitslam {

enum class Strategy { FitSlam, Greedy, Random };

/// "fit", "greedy", "random".
std::string_view strategy_name(Strategy s);
/// Accepts the names above plus "fitslam". Throws ConfigError otherwise.
Strategy parse_strategy(std::string_view name);

enum class Termination { Complete, Stalled, TimeLimit, IterationLimit };

std::string_view termination_name(Termination t);

struct MissionConfig {
  UtilityParams utility;
  /// delta_theta, gamma and occupied_threshold are used as given; fov and
  /// max_range are taken from the world's camera.
  RayCastParams raycast;
  int max_cluster_size = kDefaultMaxClusterSize;
  double max_mission_time = 3600.0;  ///< simulated seconds
  int max_iterations = 1000;
  SimParams sim;
  double voxel_size = 0.25;
  /// Waypoint spacing for the path information; 0 means the camera depth.
  double waypoint_spacing = 0.0;

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// One goal decision of a mission.
struct GoalRecord {
  int iteration = 0;
  double t = 0.0;
  Cell cell;
  double rho = 0.0;
  double theta_star = 0.0;
  std::size_t candidates = 0;  ///< reachable candidates considered
  std::optional<double> u1;
  std::optional<double> u2;
};

struct MissionResult {
  Strategy strategy = Strategy::FitSlam;
  std::uint64_t seed = 0;
  Termination reason = Termination::Complete;
  std::vector<MetricSample> log;
  std::vector<GoalRecord> goals;
  std::vector<LoopClosureEvent> loop_closures;
  CovarianceAudit audit;
  std::size_t blacklisted = 0;
  int replans = 0;
  int iterations = 0;

  [[nodiscard]] const MetricSample& final_sample() const { return log.back(); }
};

/// Runs the full explore loop on `world` until no frontier is left, every
/// candidate of an iteration is unreachable (Stalled), or a limit is hit.
/// `seed` drives the Random strategy.
MissionResult run_mission(const World& world, Strategy strategy, std::uint64_t seed, const MissionConfig& config = {});

/// First logged time with coverage >= pct percent, if reached.
std::optional<double> time_to_coverage(const std::vector<MetricSample>& log, double pct);

struct ExperimentConfig {
  WorldConfig world;
  std::vector<Strategy> strategies{Strategy::FitSlam, Strategy::Greedy, Strategy::Random};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  MissionConfig mission;
  /// Nothing is written when empty.
  std::filesystem::path out_dir;
  /// Worker threads for independent missions; 0 picks the hardware count.
  unsigned threads = 0;
};

struct StrategySummary {
  Strategy strategy = Strategy::FitSlam;
  std::size_t runs = 0;
  double median_final_trace = 0.0;
  double median_loop_closures = 0.0;
  double median_final_pct_unexplored = 0.0;
  /// Infinite when fewer than half of the runs got there.
  double median_time_to_50 = 0.0;
  double median_time_to_90 = 0.0;
  std::size_t stalled = 0;
};

struct ExperimentResult {
  std::vector<MissionResult> runs;  ///< strategy-major, then seed order
  std::vector<StrategySummary> summary;
  [[nodiscard]] bool any_stalled() const;
};

/// Each seed replaces the world seed, so every seed is a different layout
/// shared by all strategies. Writes metrics_<strategy>_<seed>.csv,
/// summary.csv, runs.csv, trace_cov.svg and pct_unexplored.svg when
/// out_dir is set; throws IoError when it cannot be written.
ExperimentResult run_experiment(const ExperimentConfig& config);

double median(std::vector<double> values);

/// CSV writers; the metrics header is t,trace_cov,pct_unexplored,n_loop_closures,distance.
std::string metrics_csv(const std::vector<MetricSample>& log);
std::string summary_csv(const std::vector<StrategySummary>& summary);
std::string runs_csv(const std::vector<MissionResult>& runs);

}  // namespace fitslam
