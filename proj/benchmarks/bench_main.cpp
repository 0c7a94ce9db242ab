#include <benchmark/benchmark.h>

#include "mixlap/dirichlet.hpp"
#include "mixlap/radial_fraclap.hpp"
#include "mixlap/special_functions.hpp"

namespace {

using namespace mixlap;

void BM_Gauss2F1Pfaff(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    r += 0.01;
    benchmark::DoNotOptimize(gauss_2f1(1.625, 1.625, 1.5, -r * r));
    if (r > 50.0) r = 0.0;
  }
}
BENCHMARK(BM_Gauss2F1Pfaff);

void BM_QuadratureClosedKernel(benchmark::State& state) {
  const auto P = OperatorParams::make(3, 0.25);
  const auto psi = RadialFunction::weight(2.75);
  for (auto _ : state) benchmark::DoNotOptimize(fraclap_quadrature(P, psi, 2.0));
}
BENCHMARK(BM_QuadratureClosedKernel)->Unit(benchmark::kMillisecond);

void BM_QuadratureAngular(benchmark::State& state) {
  const auto P = OperatorParams::make(static_cast<int>(state.range(0)), 0.5);
  const auto psi = RadialFunction::weight(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(fraclap_quadrature(P, psi, 2.0));
}
BENCHMARK(BM_QuadratureAngular)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ClosedFormCalibration(benchmark::State& state) {
  const auto P = OperatorParams::make(3, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(PsiClosedForm(P, WeightSpec(3.2)).constant());
}
BENCHMARK(BM_ClosedFormCalibration)->Unit(benchmark::kMillisecond);

void BM_DirichletSolve(benchmark::State& state) {
  const auto P = OperatorParams::make(3, 0.25);
  const DirichletProblem prob{P, CoefficientModel::upper_bound(1.0, 1.0, 1.0), 1.0,
                              RadialGrid::uniform(20.0, static_cast<int>(state.range(0))), {}};
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(prob).center_value);
}
BENCHMARK(BM_DirichletSolve)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
