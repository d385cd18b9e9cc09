#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fitslam/harness.hpp"
#include "fitslam/raster_io.hpp"

namespace fs = std::filesystem;
using namespace fitslam;

namespace {

// A JSON file, or the name of a built-in world.
WorldConfig resolve_world(const std::string& config) {
  if (fs::exists(config)) return load_world_config(config);
  for (const std::string& name : preset_names()) {
    if (config == name) return preset_world(name);
  }
  throw ConfigError("no such config file or preset: " + config);
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("bad seed '" + std::string(s) + "'");
  return v;
}

// "1..10", "3", or "1,4,9" (items may be ranges).
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::string_view rest = spec;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (const std::size_t dots = item.find(".."); dots != std::string_view::npos) {
      const std::uint64_t lo = parse_u64(item.substr(0, dots)), hi = parse_u64(item.substr(dots + 2));
      if (lo > hi) throw ConfigError("empty seed range '" + std::string(item) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_u64(item));
    }
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

std::vector<Strategy> parse_strategies(const std::string& list) {
  std::vector<Strategy> out;
  std::string_view rest = list;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    out.push_back(parse_strategy(rest.substr(0, comma)));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (out.empty()) throw ConfigError("no strategies given");
  return out;
}

void write_grid(const fs::path& path, const auto& grid) {
  std::ofstream out(path);
  write_raster(out, grid);
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FIT-SLAM exploration planner and simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string strategies = "fit,greedy,random";
  std::string seeds = "1..10";
  std::string out_dir = "results";
  bool full_res = false;
  double max_time = 3600.0;
  unsigned threads = 0;
  ExperimentConfig exp;
  double delta_theta_deg = 8.5;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Run the strategy comparison and write CSV and SVG results");
  run->add_option("--config", config, "World JSON file or preset name")->required();
  run->add_option("--strategies", strategies, "Comma list of fit, greedy, random")->capture_default_str();
  run->add_option("--seeds", seeds, "Seeds as a..b or a comma list")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("--full-res", full_res, "Use a 0.05 m grid");
  run->add_option("--alpha", exp.mission.utility.alpha, "Distance weight in u1")->capture_default_str();
  run->add_option("--beta", exp.mission.utility.beta, "u1 weight in u2")->capture_default_str();
  run->add_option("--n-shortlist", exp.mission.utility.shortlist_n, "Shortlist size")->capture_default_str();
  run->add_option("--delta-theta-deg", delta_theta_deg, "Orientation step in degrees")->capture_default_str();
  run->add_option("--gamma", exp.mission.raycast.gamma, "Observability decay")->capture_default_str();
  run->add_option("--max-time", max_time, "Mission time limit, simulated seconds")->capture_default_str();
  run->add_option("--threads", threads, "Parallel missions (0 = all cores)")->capture_default_str();
  run->add_flag("-q,--quiet", quiet, "Only print errors");

  CLI::App* world = app.add_subcommand("world", "World utilities");
  world->require_subcommand(1);
  CLI::App* preview = world->add_subcommand("preview", "Dump the surveyed world grids as text rasters");
  std::string preview_out = ".";
  std::uint64_t preview_seed = 0;
  preview->add_option("--config", config, "World JSON file or preset name")->required();
  preview->add_option("--out", preview_out, "Output directory")->capture_default_str();
  preview->add_option("--seed", preview_seed, "Override the world seed");
  preview->add_flag("--full-res", full_res, "Use a 0.05 m grid");

  CLI11_PARSE(app, argc, argv);

  try {
    WorldConfig wc = resolve_world(config);
    if (full_res) wc.resolution = 0.05;

    if (*preview) {
      if (preview->count("--seed") > 0) wc.seed = preview_seed;
      const World w = generate_world(wc);
      const GroundTruthMaps maps = survey_world(w);
      std::error_code ec;
      fs::create_directories(preview_out, ec);
      if (ec) throw IoError("cannot create " + preview_out + ": " + ec.message());
      write_grid(fs::path(preview_out) / (wc.name + "_occupancy.txt"), maps.occ);
      write_grid(fs::path(preview_out) / (wc.name + "_traversability.txt"), maps.trav);
      write_grid(fs::path(preview_out) / (wc.name + "_nav.txt"), maps.nav);
      std::cout << wc.name << ": " << w.spec.width << "x" << w.spec.height << " cells at " << w.spec.resolution
                << " m, " << w.landmarks.size() << " landmarks, " << w.boxes.size() << " boxes; rasters in "
                << preview_out << "\n";
      return 0;
    }

    exp.world = wc;
    exp.strategies = parse_strategies(strategies);
    exp.seeds = parse_seeds(seeds);
    exp.out_dir = out_dir;
    exp.threads = threads;
    exp.mission.raycast.delta_theta = deg2rad(delta_theta_deg);
    exp.mission.max_mission_time = max_time;
    const ExperimentResult result = run_experiment(exp);
    if (!quiet) {
      std::cout << summary_csv(result.summary);
      for (const MissionResult& r : result.runs) {
        if (r.reason == Termination::Stalled) {
          std::cout << "stalled: " << strategy_name(r.strategy) << " seed " << r.seed << "\n";
        }
      }
      std::cout << "results in " << out_dir << "\n";
    }
    return result.any_stalled() ? 2 : 0;
  } catch (const Error& e) {
    std::cerr << "fitslam: " << e.what() << "\n";
    return 1;
  }
}
