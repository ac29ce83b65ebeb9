#include <benchmark/benchmark.h>

#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/estimation.hpp"
#include "squidmech/fluxlock_sim.hpp"
#include "squidmech/mechanics_model.hpp"
#include "squidmech/spectra.hpp"

namespace sm = squidmech;
using sm::constants::pi;

static void BM_S0(benchmark::State& state) {
  double phi = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::s0(phi, 0.01));
    phi += 1e-6;
  }
}
BENCHMARK(BM_S0);

static void BM_MechanicalFrequency(benchmark::State& state) {
  const sm::StringParams s;
  const sm::SquidParams q;
  const double e_j = sm::josephson_energy(q);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::mechanical_frequency(s, q, {0.3, 0.035, 0.0}, e_j));
  }
}
BENCHMARK(BM_MechanicalFrequency);

static void BM_NumericSpringShift(benchmark::State& state) {
  const sm::StringParams s;
  const sm::SquidParams q;
  const double e_j = sm::josephson_energy(q);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::numeric_spring_shift(s, q, {0.3, 0.035, 0.0}, e_j));
  }
}
BENCHMARK(BM_NumericSpringShift);

static void BM_FluxSweepMap(benchmark::State& state) {
  const auto res = sm::calibrate_lc(sm::CalibrationTargets{});
  const sm::SquidParams q;
  std::vector<double> phi;
  for (int i = 0; i < 201; ++i) phi.push_back(-pi + 2.0 * pi * i / 200.0);
  std::vector<double> omega;
  for (int i = 0; i < 241; ++i) omega.push_back(2.0 * pi * (6.4e9 + 5e6 * i));
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::flux_sweep_map(res, q, phi, omega, threads));
  }
}
BENCHMARK(BM_FluxSweepMap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_FitLorentzian(benchmark::State& state) {
  const sm::StringParams s;
  const sm::ThermalNoiseConfig noise;
  const auto grid = sm::centered_grid(5.8e6, 200.0, 401);
  const auto trace = sm::synth_thermal_spectrum(s, noise, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::fit_lorentzian(trace));
  }
}
BENCHMARK(BM_FitLorentzian)->Unit(benchmark::kMicrosecond);

static void BM_FitFluxTuning(benchmark::State& state) {
  const sm::FluxTuningFixed fixed;
  const double e_j = sm::josephson_energy(fixed.squid);
  std::vector<sm::FluxTuningSample> pts;
  for (int i = 0; i < 25; ++i) {
    const double phi = -0.45 * pi + 0.9 * pi * i / 24.0;
    pts.push_back({phi, sm::mechanical_frequency(fixed.string, fixed.squid, {phi, fixed.b_ip_T, 0.0}, e_j), 0.0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::fit_flux_tuning(pts, fixed));
  }
}
BENCHMARK(BM_FitFluxTuning)->Unit(benchmark::kMicrosecond);

static void BM_RunLock(benchmark::State& state) {
  const auto res = sm::calibrate_lc(sm::CalibrationTargets{});
  sm::LockConfig cfg;
  cfg.steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sm::run_lock(cfg, res, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunLock)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
