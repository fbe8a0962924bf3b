// Serial reference vs OpenMP paths of the split-step kernels, the dispersion
// table, and one full propagation.
//   ./bench_kernels --benchmark_filter=kerr

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "fwmbs/cmt.hpp"
#include "fwmbs/kernels.hpp"
#include "fwmbs/materials.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/ssfm.hpp"
#include "fwmbs/units.hpp"

using namespace fwmbs;

namespace {

Execution exec_of(const benchmark::State& st) {
  return st.range(1) ? Execution::Parallel : Execution::Serial;
}

std::vector<Complex> field(std::size_t n) {
  std::vector<Complex> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = std::polar(1.0 + 1e-3 * (k % 97), 1e-4 * k);
  return v;
}

void BM_Multiply(benchmark::State& st) {
  auto a = field(st.range(0));
  const auto f = field(st.range(0));
  for (auto _ : st) {
    kernels::multiply(a, f, exec_of(st));
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_KerrStep(benchmark::State& st) {
  auto a = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::kerr_step(a, 1e-3, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SumPower(benchmark::State& st) {
  const auto a = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::sum_power(a, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_BuildPropagator(benchmark::State& st) {
  std::vector<Complex> f(st.range(0));
  std::vector<double> phase(st.range(0));
  for (std::size_t k = 0; k < phase.size(); ++k) phase[k] = 1e-3 * k;
  for (auto _ : st) {
    kernels::build_propagator(f, phase, 1e-4, 1.0, exec_of(st));
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

const MaterialDb& db() {
  static const MaterialDb d = load_material_db(default_materials_path());
  return d;
}

void BM_DispersionTable(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(propagation_constant_table(
        db(), WaveguideGeometry{}, TableRequest{500e-9, 2400e-9, static_cast<int>(st.range(0))},
        exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// 974 + 1550 nm pumps, 980 nm signal, 18 mm: a 2^19-point grid.
void BM_Propagation(benchmark::State& st) {
  static const auto prof = std::make_shared<DispersionProfile>(
      propagation_constant_table(db(), WaveguideGeometry{}, TableRequest{500e-9, 2400e-9, 512}));
  BraggScatteringSetup s;
  s.profile = prof;
  s.omega_p1 = omega_from_lambda(974e-9);
  s.omega_p2 = omega_from_lambda(1550e-9);
  s.omega_s = omega_from_lambda(980e-9);
  s.p1 = 13e-3;
  s.p2 = 43e-3;
  s.gamma1 = 3.69;
  s.gamma2 = 1.74;
  s.length = 18e-3;
  ExperimentPolicy pol;
  pol.min_steps = 16;
  for (auto _ : st) benchmark::DoNotOptimize(bs_conversion_experiment(s, pol, exec_of(st)).eta_plus);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int parallel : {0, 1})
    for (long n : {1L << 16, 1L << 19, 1L << 21}) b->Args({n, parallel});
  b->ArgNames({"n", "omp"});
}

}  // namespace

BENCHMARK(BM_Multiply)->Apply(sizes);
BENCHMARK(BM_KerrStep)->Apply(sizes);
BENCHMARK(BM_SumPower)->Apply(sizes);
BENCHMARK(BM_BuildPropagator)->Apply(sizes);
BENCHMARK(BM_DispersionTable)->Args({256, 0})->Args({256, 1})->ArgNames({"points", "omp"})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Propagation)->Args({0, 0})->Args({0, 1})->ArgNames({"_", "omp"})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
