#include <benchmark/benchmark.h>

#include <random>

#include "prestrain/config.hpp"
#include "prestrain/constitutive.hpp"
#include "prestrain/dynamic_solver.hpp"
#include "prestrain/initial_data.hpp"
#include "prestrain/material.hpp"
#include "prestrain/quasistatic_solver.hpp"

using namespace prestrain;

namespace {

RunConfig config(int n) {
  RunConfig c;
  c.grid.n = n;
  c.data.amplitude = 2e-2;
  c.scheme.dt = 1e-3;
  return c;
}

void BM_Respond(benchmark::State& state) {
  const DensityModel m = RunConfig().model.build();
  Mat3 F = to_mat3(Eigen::Matrix3d::Identity() + 0.05 * Eigen::Matrix3d::Random());
  for (auto _ : state) benchmark::DoNotOptimize(respond<double>(m, 0.1, F));
}
BENCHMARK(BM_Respond);

void BM_FftPair(benchmark::State& state) {
  const RunConfig c = config(static_cast<int>(state.range(0)));
  const DynamicState s = build_dynamic_initial(c);
  for (auto _ : state) benchmark::DoNotOptimize(from_physical(to_physical(s.w)));
}
BENCHMARK(BM_FftPair)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_EvaluateMaterial(benchmark::State& state) {
  const RunConfig c = config(static_cast<int>(state.range(0)));
  const DensityModel m = c.model.build();
  const DynamicState s = build_dynamic_initial(c);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_material(m, s.phi, s.w));
}
BENCHMARK(BM_EvaluateMaterial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DynamicStep(benchmark::State& state) {
  const RunConfig c = config(static_cast<int>(state.range(0)));
  DynamicState s = build_dynamic_initial(c);
  DynamicSolver solver(c.model.build(), c.scheme.dynamic(), s.w.grid());
  for (auto _ : state) solver.step(s);
}
BENCHMARK(BM_DynamicStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_QuasistaticStep(benchmark::State& state) {
  const RunConfig c = config(16);
  const DensityModel m = c.model.build();
  const QuasiState s0 = build_quasi_initial(c);
  const LinearizedSymbols sym = assemble_symbols(m, s0.phi.grid());
  const QuasiState eq = equilibrate(s0, m, sym, 1e-10, 50);
  for (auto _ : state) benchmark::DoNotOptimize(advance_quasistatic(eq, 1e-2, m, sym, 1e-10, 50));
}
BENCHMARK(BM_QuasistaticStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
