#include "adfs/analysis.hpp"
#include "adfs/noise.hpp"
#include "adfs/presets.hpp"
#include "adfs/probe.hpp"
#include "adfs/qfi.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace adfs;

void BM_DesignProbe(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SensorArray a = arrays::line(n, -1.0, 1.0, 2);
  const FieldModel f = FieldModel::inverse_power(1.0);
  const SamplingVector s = sampling_vector(f, Eigen::Vector2d(-0.5, 0.5), a);
  const auto pts = place_points(Area::segment(Eigen::Vector2d(0.8, 1.0), Eigen::Vector2d(1.2, 1.0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_probe(s, grid_silencer(f, a, pts)));
  }
}
BENCHMARK(BM_DesignProbe)->Arg(20)->Arg(200)->Arg(1000);

void BM_LpProbe(benchmark::State& state) {
  const SensorArray a = arrays::two_circles(10, 3.0, 10, 4.0);
  const FieldModel f = FieldModel::inverse_power(1.0);
  const SamplingVector s = sampling_vector(f, Eigen::Vector2d(5.0, 0.0), a);
  const auto z = grid_silencer(f, a, place_points(Area::ball(Eigen::Vector2d::Zero(), 0.1), 6));
  for (auto _ : state) benchmark::DoNotOptimize(design_probe(s, z, ProbeMode::kLpOptimal));
}
BENCHMARK(BM_LpProbe);

void BM_PhaseRates(benchmark::State& state) {
  const ScenarioConfig c = presets::table1_direction();
  const SensorArray a = c.array.build();
  const NoiseDistribution noise = combined_noise(c);
  const ProbeState k = ProbeState::ghz(a.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase_rates(noise, c.noise_field, a, k, state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhaseRates)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SensorArray a = arrays::circle(n, 0.5);
  const FieldModel f = FieldModel::inverse_power(1.0);
  const SamplingVector s = sampling_vector(f, Eigen::Vector2d(-2.0, 0.0), a);
  const DiscreteNoise noise = discretize_source(f, a, {{Eigen::Vector2d(2.0, 0.5), 1.0}}, 0.0, 1.0, 20);
  Eigen::VectorXd kv = Eigen::VectorXd::Constant(n, 0.5);
  kv[0] = 1.0;
  const ProbeState k(kv);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_qfi(s, k, noise, 1.0));
}
BENCHMARK(BM_BruteForce)->DenseRange(2, 4);

void BM_SensitivityMap(benchmark::State& state) {
  const auto setup = presets::fig3_maps();
  const SamplingVector s = sampling_vector(setup.model, setup.signal, setup.array);
  const ProbeState k = design_probe(s, grid_silencer(setup.model, setup.array, setup.silenced));
  for (auto _ : state) benchmark::DoNotOptimize(delta_map(setup.model, setup.array, k, s, setup.grid));
  state.SetItemsProcessed(state.iterations() * setup.grid.cell_count());
}
BENCHMARK(BM_SensitivityMap)->Unit(benchmark::kMillisecond);

void BM_WorstCase(benchmark::State& state) {
  const auto spec = presets::fig4_scaling(15);
  const SensorArray a = spec.make_array(25);
  const SamplingVector s = sampling_vector(spec.model, spec.signal, a);
  const ProbeState k = design_probe(s, grid_silencer(spec.model, a, place_points(spec.noise_area, 10)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        worst_case_delta(spec.model, a, k, s, spec.noise_area, static_cast<int>(state.range(0)), 3));
  }
}
BENCHMARK(BM_WorstCase)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ScalingStudy(benchmark::State& state) {
  const auto spec = presets::fig4_scaling(15);
  for (auto _ : state) benchmark::DoNotOptimize(scaling_study(spec));
}
BENCHMARK(BM_ScalingStudy)->Unit(benchmark::kMillisecond);

void BM_SquareLatticeScenario(benchmark::State& state) {
  ScenarioConfig c = presets::table1_square_lattice();
  c.samples = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(c));
}
BENCHMARK(BM_SquareLatticeScenario)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
