#include <benchmark/benchmark.h>

#include <random>

#include "fitslam/planner.hpp"

using namespace fitslam;

namespace {

BinaryTraversabilityGrid random_nav(int n, double blocked, std::uint64_t seed) {
  BinaryTraversabilityGrid nav(GridSpec{0.0, 0.0, 0.1, n, n}, NavState::Free);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution block(blocked);
  for (auto& s : nav.data()) s = block(rng) ? NavState::Blocked : NavState::Free;
  nav(Cell{0, 0}) = NavState::Free;
  nav(Cell{n - 1, n - 1}) = NavState::Free;
  return nav;
}

void BM_AStarCorner(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto nav = random_nav(n, 0.2, 3);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(plan(nav, Cell{0, 0}, Cell{n - 1, n - 1}));
    } catch (const NoPath&) {
    }
  }
}
BENCHMARK(BM_AStarCorner)->Arg(64)->Arg(200)->Arg(400);

void BM_DistanceField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto nav = random_nav(n, 0.2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(distance_field(nav, Cell{0, 0}));
}
BENCHMARK(BM_DistanceField)->Arg(64)->Arg(400);

}  // namespace
