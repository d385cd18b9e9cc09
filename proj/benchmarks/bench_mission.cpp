#include <benchmark/benchmark.h>

#include "fitslam/harness.hpp"

using namespace fitslam;

namespace {

void BM_SenseStep(benchmark::State& state) {
  const World world = generate_world(preset_world("ramp_yard"));
  MissionState ms = init_mission(world);
  for (auto _ : state) {
    ms.belief.pose.theta += 0.3;
    benchmark::DoNotOptimize(sense(world, ms));
  }
}
BENCHMARK(BM_SenseStep);

void BM_MissionObstacleRing(benchmark::State& state) {
  const World world = generate_world(preset_world("obstacle_ring"));
  for (auto _ : state) benchmark::DoNotOptimize(run_mission(world, Strategy::FitSlam, 1));
}
BENCHMARK(BM_MissionObstacleRing)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
