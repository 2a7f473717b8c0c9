#include <benchmark/benchmark.h>

#include <cmath>

#include "molgec/controller.hpp"
#include "molgec/rosenbrock.hpp"
#include "molgec/spatial.hpp"

using namespace molgec;

namespace {

void BM_ShiftedSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Tridiag a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.diag(i) = -2.0;
    if (i > 0) a.lower(i) = 1.0;
    if (i + 1 < n) a.upper(i) = 1.0;
  }
  std::vector<double> rhs(n, 1.0);
  for (auto _ : state) {
    const ShiftedSolver lu(a, 0.3);
    benchmark::DoNotOptimize(lu.solve(rhs));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ShiftedSolve)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_Ros3pStep(benchmark::State& state) {
  const auto spec = make_benchmark(BenchmarkId::allen_cahn);
  const auto mesh = Mesh::uniform(spec.domain, static_cast<std::size_t>(state.range(0)), spec.bc);
  const MolSystem sys(spec, mesh);
  const auto v = initial_restriction(spec, mesh);
  const double tau = 1e-4;
  for (auto _ : state) {
    const auto f0 = sys.rhs(0.0, v);
    const ShiftedSolver lu(sys.jacobian(0.0, v), ros3p().gamma * tau);
    benchmark::DoNotOptimize(ros3p_step(sys, 0.0, tau, v, f0, lu));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ros3pStep)->RangeMultiplier(4)->Range(128, 8192)->Complexity(benchmark::oN);

void BM_HermiteTransfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto from = Mesh::uniform({0.0, 1.0}, n, BoundaryKind::dirichlet);
  const auto to = Mesh::uniform({0.0, 1.0}, n + n / 3, BoundaryKind::dirichlet);
  std::vector<double> v;
  for (double x : from.nodes()) v.push_back(std::sin(3.0 * x));
  for (auto _ : state) benchmark::DoNotOptimize(transfer_solution(v, from, to));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HermiteTransfer)->RangeMultiplier(4)->Range(128, 8192)->Complexity(benchmark::oN);

void BM_HeatRun(benchmark::State& state) {
  const auto spec = make_benchmark(BenchmarkId::heat_neumann);
  const auto pair = MeshPair::uniform(spec.domain, 51, spec.bc);
  for (auto _ : state) benchmark::DoNotOptimize(run_single(spec, pair, {1e-4, 1e-4, 1e-3, 1e-3}, {}));
}
BENCHMARK(BM_HeatRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
