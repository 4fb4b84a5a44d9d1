#include <benchmark/benchmark.h>

#include "tabletop/engine.hpp"

using namespace tabletop;

namespace {

// A mid-trial world: scattered blocks, a warmed-up gaze window and a few pickups.
WorldState busy_world() {
  const Scenario s = generate_scenario({TaskType::coupled, Placement::scattered, 7, kDefaultBlockCount});
  WorldState w = WorldState::from_scenario(s, SimConfig{});
  for (int t = 0; t < 200; ++t) gaze_observe(w.field, Position{0.2 + 0.003 * t, 0.3});
  for (int k = 0; k < 4; ++k) {
    proximity_update(w.field, Pickup{k % 2 ? Actor::robot : Actor::user, w.blocks[static_cast<std::size_t>(k)].position},
                     0.05, 0.15, k);
  }
  return w;
}

void BM_ProactiveSelect(benchmark::State& state) {
  const WorldState w = busy_world();
  for (auto _ : state) benchmark::DoNotOptimize(proactive_select(w, w.robot.gripper));
}
BENCHMARK(BM_ProactiveSelect);

void BM_DistanceSelect(benchmark::State& state) {
  const WorldState w = busy_world();
  for (auto _ : state) benchmark::DoNotOptimize(distance_select(w, w.robot.base));
}
BENCHMARK(BM_DistanceSelect);

void BM_GazeSelect(benchmark::State& state) {
  const WorldState w = busy_world();
  for (auto _ : state) benchmark::DoNotOptimize(gaze_select(w, w.field.gaze, 0.15));
}
BENCHMARK(BM_GazeSelect);

void BM_ProximitySelect(benchmark::State& state) {
  const WorldState w = busy_world();
  const PolicyParams params;
  for (auto _ : state) benchmark::DoNotOptimize(proximity_select(w, w.field.proximity, params));
}
BENCHMARK(BM_ProximitySelect);

void BM_GazeObserve(benchmark::State& state) {
  ScoreField f = ScoreField::make(SimConfig{});
  double x = 0.0;
  for (auto _ : state) {
    x = x > 1.0 ? 0.0 : x + 0.01;
    gaze_observe(f, Position{x, 0.4});
  }
}
BENCHMARK(BM_GazeObserve);

void BM_ProximityDecay(benchmark::State& state) {
  ScoreField f = ScoreField::make(SimConfig{});
  proximity_update(f, Pickup{Actor::user, {0.4, 0.4}}, 0.05, 0.15, 0);
  for (auto _ : state) proximity_update(f, std::nullopt, 0.05, 0.15, 1);
}
BENCHMARK(BM_ProximityDecay);

}  // namespace
