// Microbenchmarks for the per-frame metric kernels and the whole-scenario
// driver, using generated scenarios so the workload matches production data.

#include <benchmark/benchmark.h>

#include <vector>

#include "driveaudit/metrics.hpp"
#include "driveaudit/scenario.hpp"
#include "driveaudit/synthgen.hpp"

namespace {

using namespace driveaudit;

Scenario scenario_of(SynthKind kind) {
  SynthCase c;
  c.kind = kind;
  c.scenario_id = "bench";
  return generate(c).scenario;
}

// Predictive time-to-collision for a closing rear-end pair: the sweep ends
// at the contact, a few hundred fine steps in.
void BM_TtcClosing(benchmark::State& state) {
  const Scenario s = scenario_of(SynthKind::CarFollowing);
  const AgentTrack& ego = s.ego();
  const AgentTrack& lead = *s.find_agent("veh-lead");
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_ttc(ego, lead, 0, s.dt()));
  }
}
BENCHMARK(BM_TtcClosing);

// Worst case: a never-colliding pair forces the sweep to exhaust the 40 s
// horizon (the conservative skip keeps this sublinear in fine steps).
void BM_TtcNoContact(benchmark::State& state) {
  const Scenario s = scenario_of(SynthKind::StationaryField);
  const AgentTrack& ego = s.ego();
  const AgentTrack& far = s.agents.back();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_ttc(ego, far, 0, s.dt()));
  }
}
BENCHMARK(BM_TtcNoContact);

void BM_GapCorridor(benchmark::State& state) {
  const Scenario s = scenario_of(SynthKind::CarFollowing);
  const AgentTrack& ego = s.ego();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gap(ego, s.agents, 0));
  }
}
BENCHMARK(BM_GapCorridor);

void BM_PetOccupancy(benchmark::State& state) {
  const Scenario s = scenario_of(SynthKind::CrossingPaths);
  const AgentTrack& ego = s.ego();
  const AgentTrack& cross = *s.find_agent("veh-cross");
  const std::vector<Vec2> square = {{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_pet(ego, cross, square, s.dt()));
  }
}
BENCHMARK(BM_PetOccupancy);

void BM_VelAccSeries(benchmark::State& state) {
  const Scenario s = scenario_of(SynthKind::CarFollowing);
  const AgentTrack& ego = s.ego();
  for (auto _ : state) {
    const auto vel = compute_vel(ego, s.dt());
    benchmark::DoNotOptimize(compute_acc(vel, s.dt()));
  }
}
BENCHMARK(BM_VelAccSeries);

// Whole-scenario cost for each generator family; the corpus throughput
// targets derive from these numbers.
void BM_ComputeAll(benchmark::State& state) {
  const Scenario s = scenario_of(kAllSynthKinds[static_cast<std::size_t>(state.range(0))]);
  long long samples = 0;
  for (auto _ : state) {
    const auto out = compute_all(s);
    samples += static_cast<long long>(out.size());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(std::string(to_string(kAllSynthKinds[static_cast<std::size_t>(state.range(0))])));
  state.SetItemsProcessed(samples);
}
BENCHMARK(BM_ComputeAll)->DenseRange(0, 5);

}  // namespace

BENCHMARK_MAIN();
