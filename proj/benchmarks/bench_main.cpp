#include <benchmark/benchmark.h>

#include "delayop/analysis.hpp"
#include "delayop/dynamics.hpp"
#include "delayop/experiments.hpp"
#include "delayop/spectral.hpp"

namespace {

using namespace delayop;

DelayOperator ring_operator(int n) {
  const auto net = build_ring(n, n / 4);
  return build_delay_operator(net, delays_from_distances(net, kDefaultRingSpeed * n / 100.0),
                              20.0 * 3.141592653589793, 0.5);
}

// 1000 Euler steps (0.1 s) of the delayed ring, per N.
void BM_DelayedEuler(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto net = build_ring(n, n / 4);
  const auto tau = delays_from_distances(net, kDefaultRingSpeed * n / 100.0);
  SimConfig cfg;
  cfg.t_end = 0.1;
  cfg.record_every = 1000;
  const auto theta0 = random_ic(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_dkm(net, tau, cfg, theta0));
  state.SetItemsProcessed(state.iterations() * 1000 * n * (n / 2));
}
BENCHMARK(BM_DelayedEuler)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_CdtSpectrum(benchmark::State& state) {
  const auto op = ring_operator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cdt_spectrum(op));
}
BENCHMARK(BM_CdtSpectrum)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_NumericSpectrum(benchmark::State& state) {
  const auto op = ring_operator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(numeric_spectrum(op));
}
BENCHMARK(BM_NumericSpectrum)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FlowStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto op = ring_operator(n);
  const FlowPropagator prop(cdt_spectrum(op), 20.0 * 3.141592653589793, 1e-3);
  auto x = ComplexState::from_phases(random_ic(n, 2));
  for (auto _ : state) {
    x = prop.step(x);
    benchmark::DoNotOptimize(x.x.data());
  }
}
BENCHMARK(BM_FlowStep)->Arg(100)->Arg(400);

void BM_ModeContributions(benchmark::State& state) {
  const auto spec = cdt_spectrum(ring_operator(100));
  const auto x = ComplexState::from_phases(random_ic(100, 3));
  for (auto _ : state) benchmark::DoNotOptimize(mode_contributions(x, spec));
}
BENCHMARK(BM_ModeContributions);

}  // namespace

BENCHMARK_MAIN();
