#include <benchmark/benchmark.h>

#include <random>

#include "fitslam/infogain.hpp"

using namespace fitslam;

namespace {

OccupancyGrid half_unknown(int n) {
  OccupancyGrid occ(GridSpec{0.0, 0.0, 0.1, n, n});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> p(0.02, 0.98);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n / 2; ++i) occ(Cell{i, j}) = p(rng) < 0.85 ? 0.1 : 0.9;
  }
  return occ;
}

void BM_ScanOrientations(benchmark::State& state) {
  const auto occ = half_unknown(128);
  RayCastParams params;
  for (auto _ : state) benchmark::DoNotOptimize(scan_orientations(occ, Point2{6.4, 6.4}, params));
}
BENCHMARK(BM_ScanOrientations);

void BM_MapEntropy(benchmark::State& state) {
  const auto occ = half_unknown(400);
  for (auto _ : state) benchmark::DoNotOptimize(map_entropy(occ));
}
BENCHMARK(BM_MapEntropy);

}  // namespace
