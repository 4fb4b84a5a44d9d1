#include <benchmark/benchmark.h>

#include "tabletop/engine.hpp"
#include "tabletop/metrics.hpp"

using namespace tabletop;

namespace {

// One complete headless trial per iteration, per technique.
void BM_Trial(benchmark::State& state) {
  const auto kind = static_cast<PolicyKind>(state.range(0));
  const Scenario s = generate_scenario({TaskType::coupled, Placement::scattered, 3, kDefaultBlockCount});
  for (auto _ : state) {
    ScriptedHuman human(HumanModel{});
    auto trial = run_trial(s, SimConfig{}, kind, human, 24000);
    benchmark::DoNotOptimize(trial.first.ticks);
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Trial)->DenseRange(0, 7)->Unit(benchmark::kMillisecond);

void BM_FluencyReport(benchmark::State& state) {
  const Scenario s = generate_scenario({TaskType::coupled, Placement::scattered, 3, kDefaultBlockCount});
  ScriptedHuman human(HumanModel{});
  const EventLog log = run_trial(s, SimConfig{}, PolicyKind::gaze, human, 24000).second;
  for (auto _ : state) benchmark::DoNotOptimize(fluency_report(log));
}
BENCHMARK(BM_FluencyReport);

void BM_LogRoundTrip(benchmark::State& state) {
  const Scenario s = generate_scenario({TaskType::coupled, Placement::scattered, 3, kDefaultBlockCount});
  ScriptedHuman human(HumanModel{});
  const EventLog log = run_trial(s, SimConfig{}, PolicyKind::proximity, human, 24000).second;
  for (auto _ : state) benchmark::DoNotOptimize(parse_jsonl(to_jsonl(log)));
}
BENCHMARK(BM_LogRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
