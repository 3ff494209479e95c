// Microbenchmarks for the hot paths: padded-FFT products, propagator tables,
// the time stepper and the lemma measurement. Run manually:
//   build/benchmarks/wmhd-bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "wmhd/calculus.hpp"
#include "wmhd/decay.hpp"
#include "wmhd/diagnostics.hpp"
#include "wmhd/product.hpp"
#include "wmhd/propagator.hpp"
#include "wmhd/solver.hpp"

using namespace wmhd;

namespace {

StateVector bench_state(const LatticeSpec& lat, std::uint64_t seed) {
  StateVector s(lat);
  s.v = leray_project(random_hermitian_field(lat, 3, seed));
  s.B = leray_project(random_hermitian_field(lat, 3, seed + 1));
  for (int c = 0; c < 3; ++c) s.B.at(0, 0, 0, c) = cplx(0.0);
  auto [til, bar] = helmholtz_split(random_hermitian_field(lat, 3, seed + 2));
  s.Etil = std::move(til);
  s.Ebar = std::move(bar);
  return s;
}

void BM_convolve(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  SpectralProducts engine(lat);
  const SpectralField f = random_hermitian_field(lat, 3, 1);
  const SpectralField g = random_hermitian_field(lat, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(engine.convolve(f, g));
}
BENCHMARK(BM_convolve)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_convolve_direct(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  const SpectralField f = random_hermitian_field(lat, 3, 1);
  const SpectralField g = random_hermitian_field(lat, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(f, g));
}
BENCHMARK(BM_convolve_direct)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_cross(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  SpectralProducts engine(lat);
  const SpectralField f = random_hermitian_field(lat, 3, 1);
  const SpectralField g = random_hermitian_field(lat, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(engine.cross(f, g));
}
BENCHMARK(BM_cross)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_tensor_divergence(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  SpectralProducts engine(lat);
  const SpectralField f = leray_project(random_hermitian_field(lat, 3, 1));
  for (auto _ : state) benchmark::DoNotOptimize(engine.tensor_divergence(f, f));
}
BENCHMARK(BM_tensor_divergence)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_propagator_table(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(PropagatorTable(lat, 5e-3, 1.0, 1.0));
}
BENCHMARK(BM_propagator_table)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_mild_step(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  SolverConfig cfg;
  cfg.dt = 5e-3;
  MildStepper stepper(lat, cfg);
  const StateVector s = bench_state(lat, 5);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s));
}
BENCHMARK(BM_mild_step)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_xnorm(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  const SpectralField f = random_hermitian_field(lat, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(xnorm(f, 1.0));
}
BENCHMARK(BM_xnorm)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_leray_project(benchmark::State& state) {
  const LatticeSpec lat(static_cast<int>(state.range(0)));
  const SpectralField f = random_hermitian_field(lat, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(leray_project(f));
}
BENCHMARK(BM_leray_project)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_energy_budget(benchmark::State& state) {
  const LatticeSpec lat(8);
  SpectralProducts products(lat);
  const StepContext ctx{products, 1.0, 1.0};
  SolverConfig cfg;
  cfg.dt = 5e-3;
  MildStepper stepper(lat, cfg);
  const StateVector s0 = bench_state(lat, 7);
  const StateVector s1 = stepper.step(s0);
  for (auto _ : state) benchmark::DoNotOptimize(energy_budget(s0, s1, cfg.dt, ctx));
}
BENCHMARK(BM_energy_budget)->Unit(benchmark::kMicrosecond);

void BM_lemma_check(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lemma_check(0.5, 1.0, 1.0, 1.0, n_max));
}
BENCHMARK(BM_lemma_check)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
