#include <benchmark/benchmark.h>

#include <random>

#include "fitslam/fisher.hpp"

using namespace fitslam;

namespace {

std::vector<Landmark> scatter(int count) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xy(0.0, 20.0), z(0.0, 1.5);
  std::vector<Landmark> out(count);
  for (Landmark& l : out) l.position = Eigen::Vector3d(xy(rng), xy(rng), z(rng));
  return out;
}

void BM_LandmarkFim(benchmark::State& state) {
  const CameraPose cam = camera_pose_from_heading(10.0, 10.0, 0.3, 0.4, deg2rad(87.0), 5.0);
  Landmark l;
  l.position = Eigen::Vector3d(12.5, 11.5, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(landmark_fim(cam, l));
}
BENCHMARK(BM_LandmarkFim);

void BM_PathInformation(benchmark::State& state) {
  const auto landmarks = scatter(static_cast<int>(state.range(0)));
  const VoxelLandmarks voxels = voxelize_landmarks(landmarks, 0.25);
  std::vector<Waypoint> path;
  for (int k = 0; k < 6; ++k) path.push_back(Waypoint{2.0 + 3.0 * k, 2.0 + 3.0 * k, 0.785});
  for (auto _ : state) benchmark::DoNotOptimize(path_information(path, voxels, PathInformationParams{}));
}
BENCHMARK(BM_PathInformation)->Arg(100)->Arg(1000);

}  // namespace
