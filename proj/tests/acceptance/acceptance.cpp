// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "../support/oracles.hpp"
#include "fitslam/harness.hpp"

using namespace fitslam;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// -- 1 ------------------------------------------------------------------------

Verdict jacobian_vs_finite_differences() {
  constexpr double kTol = 1e-5, kBudget = 5.0;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-1.0, 1.0), depth(0.5, 5.0), pos(-10.0, 10.0);
  const Stopwatch sw;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    CameraPose cam;
    cam.rotation = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized().toRotationMatrix();
    cam.translation = Eigen::Vector3d(pos(rng), pos(rng), pos(rng));
    // Landmark in front of the camera, expressed in the world frame.
    const Eigen::Vector3d v_c = Eigen::Vector3d(u(rng), u(rng), 1.0).normalized() * depth(rng);
    Landmark l;
    l.position = cam.rotation.transpose() * (v_c - cam.translation);
    const Matrix36 j = bearing_jacobian(cam, l);
    const Eigen::Matrix<double, 3, 6> n = oracle::numeric_jacobian(cam, l.position, 1e-6);
    worst = std::max(worst, (j - n).norm() / j.norm());
  }
  const double t = sw.seconds();
  return {worst < kTol && t < kBudget, fmt("max rel err %.3e (< %.0e), %.2f s (< %.0f s)", worst, kTol, t, kBudget)};
}

// -- 2 ------------------------------------------------------------------------

Verdict orientation_scan_oracle() {
  constexpr double kTol = 1e-12, kBudget = 30.0;
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> pos(0.0, 3.2);
  const RayCastParams params;
  const Stopwatch sw;
  int argmax_mismatch = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const OccupancyGrid occ = oracle::random_half_unknown(rng, 64, 0.05);
    const Point2 goal{pos(rng), pos(rng)};
    const OrientationScan s = scan_orientations(occ, goal, params);
    const oracle::WindowScan o = oracle::window_scan(occ, goal, params);
    if (s.best_theta != o.best_theta || s.window_gains.size() != o.window_gains.size()) {
      ++argmax_mismatch;
      continue;
    }
    for (std::size_t m = 0; m < o.window_gains.size(); ++m) {
      worst = std::max(worst, std::abs(s.window_gains[m] - o.window_gains[m]));
    }
  }
  const double t = sw.seconds();
  return {argmax_mismatch == 0 && worst <= kTol && t < kBudget,
          fmt("argmax mismatches %d, max gain diff %.2e (<= %.0e), %.2f s (< %.0f s)", argmax_mismatch, worst, kTol,
              t, kBudget)};
}

// -- 3 ------------------------------------------------------------------------

Verdict planner_optimality() {
  constexpr double kBudget = 30.0;
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> idx(0, 63);
  const Stopwatch sw;
  int mismatches = 0, solved = 0;
  for (int k = 0; k < 200; ++k) {
    BinaryTraversabilityGrid nav = oracle::random_nav(rng, 64, 0.2);
    const Cell start{idx(rng), idx(rng)}, goal{idx(rng), idx(rng)};
    nav(start) = NavState::Free;
    nav(goal) = NavState::Free;
    const auto expected = oracle::dijkstra(nav, start, goal);
    try {
      const Path p = plan(nav, start, goal);
      if (!expected || p.axis_steps != expected->a || p.diagonal_steps != expected->d) ++mismatches;
      ++solved;
    } catch (const NoPath&) {
      if (expected) ++mismatches;
    }
  }
  const double t = sw.seconds();
  return {mismatches == 0 && t < kBudget,
          fmt("%d/200 cost mismatches (%d reachable), %.2f s (< %.0f s)", mismatches, solved, t, kBudget)};
}

// -- 4 ------------------------------------------------------------------------

Verdict entropy_fixed_points() {
  constexpr double kPosterior = 0.8645, kGain = 0.425, kGainTol = 1e-3;
  const bool fixed = cell_entropy(0.5) == 1.0 && cell_entropy(0.0) == 0.0 && cell_entropy(1.0) == 0.0;
  // Fourth Unknown cell along a ray: three Unknown cells crossed before it.
  OccupancyGrid occ(GridSpec{0.0, 0.0, 1.0, 8, 1});
  RayCastParams p;
  p.gamma = 0.9;
  p.max_range = 8.0;
  const RayResult r = cast_ray(occ, Point2{0.5, 0.5}, 0.0, p);
  const RayCell& c = r.cells.at(3);
  const bool posterior_ok = std::abs(c.posterior - kPosterior) <= 1e-12;
  const bool gain_ok = std::abs(c.gain - kGain) <= kGainTol;
  return {fixed && posterior_ok && gain_ok,
          fmt("H(.5)=%.17g H(0)=%g H(1)=%g; N=3 posterior %.10f (want %.4f), gain %.7f (want %.3f +/- %.0e)",
              cell_entropy(0.5), cell_entropy(0.0), cell_entropy(1.0), c.posterior, kPosterior, c.gain, kGain,
              kGainTol)};
}

// -- 5 ------------------------------------------------------------------------

Verdict covariance_monotonicity(const ExperimentResult& exp) {
  std::size_t motion = 0, meas = 0, motion_bad = 0, meas_bad = 0;
  double worst = 0.0;
  for (const MissionResult& r : exp.runs) {
    motion += r.audit.motion_updates;
    meas += r.audit.measurement_updates;
    motion_bad += r.audit.motion_violations;
    meas_bad += r.audit.measurement_violations;
    worst = std::max(worst, r.audit.worst_measurement_excess);
  }
  return {motion > 0 && meas > 0 && motion_bad == 0 && meas_bad == 0,
          fmt("%zu missions: %zu motion updates (%zu decreased), %zu measurement updates (%zu grew > 1e-12, worst "
              "%+.2e)",
              exp.runs.size(), motion, motion_bad, meas, meas_bad, worst)};
}

// -- 6, 7 -------------------------------------------------------------------

const StrategySummary& summary_of(const ExperimentResult& exp, Strategy s) {
  for (const StrategySummary& x : exp.summary) {
    if (x.strategy == s) return x;
  }
  throw std::logic_error("strategy missing from summary");
}

Verdict directional_reproduction(const ExperimentResult& exp, double seconds) {
  constexpr double kBudget = 300.0, kMaxUnexplored = 5.0;
  const StrategySummary& fit = summary_of(exp, Strategy::FitSlam);
  const StrategySummary& greedy = summary_of(exp, Strategy::Greedy);
  const StrategySummary& random = summary_of(exp, Strategy::Random);
  const bool trace_ok =
      fit.median_final_trace < greedy.median_final_trace && fit.median_final_trace < random.median_final_trace;
  const bool lc_ok = fit.median_loop_closures >= greedy.median_loop_closures &&
                     fit.median_loop_closures >= random.median_loop_closures;
  std::size_t incomplete = 0;
  for (const MissionResult& r : exp.runs) {
    if (r.final_sample().pct_unexplored > kMaxUnexplored && r.reason != Termination::Stalled) ++incomplete;
  }
  return {trace_ok && lc_ok && incomplete == 0 && seconds < kBudget,
          fmt("median trace fit %.4g / greedy %.4g / random %.4g; median loop closures %.1f / %.1f / %.1f; "
              "%zu runs above %.0f%% unexplored without stall; %.1f s (< %.0f s)",
              fit.median_final_trace, greedy.median_final_trace, random.median_final_trace, fit.median_loop_closures,
              greedy.median_loop_closures, random.median_loop_closures, incomplete, kMaxUnexplored, seconds,
              kBudget)};
}

Verdict greedy_early_phase(const ExperimentResult& exp) {
  const double g = summary_of(exp, Strategy::Greedy).median_time_to_50;
  const double r = summary_of(exp, Strategy::Random).median_time_to_50;
  return {g <= r, fmt("median time to 50%% coverage greedy %.1f s, random %.1f s", g, r)};
}

// -- 8 ------------------------------------------------------------------------

Verdict parameter_collapse(const WorldConfig& base) {
  MissionConfig collapsed;
  collapsed.utility.alpha = 1.0;
  collapsed.utility.beta = 1.0;
  int differing = 0;
  std::size_t goals = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    WorldConfig wc = base;
    wc.seed = seed;
    const World world = generate_world(wc);
    const MissionResult fit = run_mission(world, Strategy::FitSlam, seed, collapsed);
    const MissionResult greedy = run_mission(world, Strategy::Greedy, seed);
    bool same = fit.goals.size() == greedy.goals.size();
    for (std::size_t k = 0; same && k < fit.goals.size(); ++k) same = fit.goals[k].cell == greedy.goals[k].cell;
    if (!same) ++differing;
    goals += greedy.goals.size();
  }
  return {differing == 0, fmt("%d/5 seeds with a different goal sequence (%zu greedy goals total)", differing, goals)};
}

// -- 9 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism(const fs::path& a, const fs::path& b) {
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  std::size_t files_b = 0;
  for (const auto& entry : fs::directory_iterator(b)) files_b += entry.path().extension() == ".csv";
  return {files > 0 && differing == 0 && files == files_b,
          fmt("%zu CSV files compared, %zu differ", files, differing + (files == files_b ? 0 : 1))};
}

int report(int id, const char* name, const Verdict& v) {
  std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
  return v.pass ? 0 : 1;
}

int guarded(int id, const char* name, const std::function<Verdict()>& f) {
  try {
    return report(id, name, f());
  } catch (const std::exception& e) {
    return report(id, name, Verdict{false, std::string("exception: ") + e.what()});
  }
}

}  // namespace

int main() {
  int failures = 0;
  failures += guarded(1, "jacobian", jacobian_vs_finite_differences);
  failures += guarded(2, "orientation-search", orientation_scan_oracle);
  failures += guarded(3, "planner-optimality", planner_optimality);
  failures += guarded(4, "entropy-fixed-points", entropy_fixed_points);

  const fs::path root = fs::temp_directory_path() / "fitslam_acceptance";
  fs::remove_all(root);
  ExperimentConfig cfg;
  cfg.world = preset_world("ramp_yard");
  ExperimentResult first, second;
  double first_seconds = 0.0;
  std::string experiment_error;
  try {
    cfg.out_dir = root / "a";
    const Stopwatch sw;
    first = run_experiment(cfg);
    first_seconds = sw.seconds();
    cfg.out_dir = root / "b";
    second = run_experiment(cfg);
  } catch (const std::exception& e) {
    experiment_error = e.what();
  }
  auto needs_experiment = [&](const std::function<Verdict()>& f) {
    return [&, f] {
      if (!experiment_error.empty()) throw std::runtime_error(experiment_error);
      return f();
    };
  };

  failures += guarded(5, "covariance-monotonicity", needs_experiment([&] { return covariance_monotonicity(first); }));
  failures += guarded(6, "directional-reproduction",
                      needs_experiment([&] { return directional_reproduction(first, first_seconds); }));
  failures += guarded(7, "greedy-early-phase", needs_experiment([&] { return greedy_early_phase(first); }));
  failures += guarded(8, "parameter-collapse", [&] { return parameter_collapse(cfg.world); });
  failures += guarded(9, "determinism", needs_experiment([&] { return determinism(root / "a", root / "b"); }));
  fs::remove_all(root);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
