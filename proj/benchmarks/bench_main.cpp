#include <memory>

#include <benchmark/benchmark.h>

#include "diracnls/bootstrap.hpp"
#include "diracnls/linear_spectrum.hpp"
#include "diracnls/model.hpp"

using namespace diracnls;

namespace {

ModelParameters params(int cutoff) {
  ModelParameters p;
  p.cutoff = cutoff;
  return p;
}

const Workspace& workspace(int cutoff) {
  static std::shared_ptr<const Workspace> ws[9];
  if (!ws[cutoff]) ws[cutoff] = std::make_shared<const Workspace>(params(cutoff));
  return *ws[cutoff];
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto& ws = workspace(N);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_hamiltonian(ws.lattice(), ws.index_set(), ws.potential()));
  state.counters["dimension"] = static_cast<double>(ws.index_set().size());
}
BENCHMARK(BM_BuildHamiltonian)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveSpectrum(benchmark::State& state) {
  const auto& ws = workspace(static_cast<int>(state.range(0)));
  const auto H = build_hamiltonian(ws.lattice(), ws.index_set(), ws.potential());
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(H));
}
BENCHMARK(BM_SolveSpectrum)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_LinearProblem(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_linear_problem(p));
}
BENCHMARK(BM_LinearProblem)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_GridRoundTrip(benchmark::State& state) {
  const auto& ws = workspace(static_cast<int>(state.range(0)));
  const auto& phi = ws.basis().phi_a();
  for (auto _ : state) benchmark::DoNotOptimize(ws.grid().from_grid(ws.grid().to_grid(phi)));
  state.counters["grid"] = static_cast<double>(ws.grid().n_x());
}
BENCHMARK(BM_GridRoundTrip)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Resolvent(benchmark::State& state) {
  const auto& ws = workspace(6);
  const auto f = project_perp(ws.basis(), apply_rotation(ws.basis().phi_a()) + ws.basis().eigenfield(5));
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_apply(ws.basis(), f, 0.001));
}
BENCHMARK(BM_Resolvent)->Unit(benchmark::kMicrosecond);

void BM_PerturbationReport(benchmark::State& state) {
  const auto& ws = workspace(6);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        complex_interaction(ws.grid(), ws.basis(), ws.expansion().K_field, ws.expansion().M_field));
}
BENCHMARK(BM_PerturbationReport)->Unit(benchmark::kMillisecond);

void BM_BootstrapPolar(benchmark::State& state) {
  static const BootstrapSolver solver(std::make_shared<const Workspace>(params(6)));
  BootstrapConfig c;
  c.epsilon = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(solver.bootstrap_polar(true, c));
}
BENCHMARK(BM_BootstrapPolar)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BootstrapEquator(benchmark::State& state) {
  static const BootstrapSolver solver(std::make_shared<const Workspace>(params(6)));
  BootstrapConfig c;
  c.epsilon = 0.04;
  for (auto _ : state) benchmark::DoNotOptimize(solver.bootstrap_equator(0.3, c));
}
BENCHMARK(BM_BootstrapEquator)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
