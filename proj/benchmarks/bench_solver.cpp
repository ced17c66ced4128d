#include <benchmark/benchmark.h>

#include "fdirac/expression.hpp"
#include "fdirac/forward.hpp"
#include "fdirac/inverse.hpp"

namespace {

fdirac::Model make_model(const char* m12, std::size_t points) {
  fdirac::ModelSpec s;
  s.p = "cos(2*x) + sin(x)";
  s.r = "cos(2*x) - sin(x)";
  s.m12 = m12;
  return fdirac::Model::create(s, points);
}

void BM_ExpressionEval(benchmark::State& state) {
  const auto e = fdirac::Expression::parse("0.3*cos(x - t) + exp(-x*t)/2");
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(x, 0.5 * x));
    x += 1e-9;
  }
}
BENCHMARK(BM_ExpressionEval);

void BM_SolvePotentialOnly(benchmark::State& state) {
  const auto model = make_model("0", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fdirac::solve_endpoint(model, 40.0));
}
BENCHMARK(BM_SolvePotentialOnly)->Arg(1025)->Arg(4097)->Unit(benchmark::kMicrosecond);

void BM_SolveTOnlyKernel(benchmark::State& state) {
  const auto model = make_model("cos(t)", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fdirac::solve_endpoint(model, 40.0));
}
BENCHMARK(BM_SolveTOnlyKernel)->Arg(1025)->Arg(4097)->Unit(benchmark::kMicrosecond);

void BM_SolveGeneralKernel(benchmark::State& state) {
  const auto model = make_model("0.2*cos(x - t)", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fdirac::solve_endpoint(model, 40.0));
}
BENCHMARK(BM_SolveGeneralKernel)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_FindEigenvalues(benchmark::State& state) {
  const auto model = make_model("0", fdirac::SGrid::default_points);
  for (auto _ : state) benchmark::DoNotOptimize(fdirac::find_eigenvalues(model, 1, 16));
}
BENCHMARK(BM_FindEigenvalues)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const auto model = make_model("0", fdirac::SGrid::default_points);
  const auto spectrum = fdirac::find_eigenvalues(model, 16, 64);
  const auto set = fdirac::compute_nodal_set(model, spectrum);
  const auto data = fdirac::NodalDataset::from_nodal_set(model.alpha(), set);
  const fdirac::KnownL known{fdirac::GridFn(model.grid_ptr(), 0.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdirac::reconstruct(data, known, model.grid_ptr()));
  }
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
