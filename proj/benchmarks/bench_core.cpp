#include <benchmark/benchmark.h>

#include "pharmonic/integrator.hpp"
#include "pharmonic/local_solver.hpp"
#include "pharmonic/ode.hpp"

namespace {

using namespace pharmonic;

ProblemSpec hyperbolic_pair(int n, double p) {
  return ProblemSpec(n, p, make_profile(WarpKind::Hyperbolic),
                     make_profile(WarpKind::Hyperbolic));
}

void BM_second_derivative(benchmark::State& state) {
  const ProblemSpec spec = hyperbolic_pair(3, 3.0);
  double r = 1.0;
  for (auto _ : state) {
    const StatePoint s{r, 0.8 * r, 0.9};
    benchmark::DoNotOptimize(second_derivative(spec, s));
    r = r < 10.0 ? r + 1e-6 : 1.0;  // defeat value caching
  }
}
BENCHMARK(BM_second_derivative);

void BM_integrate_hyperbolic(benchmark::State& state) {
  const ProblemSpec spec = hyperbolic_pair(3, 3.0);
  const StatePoint start{0.05, 0.025, 0.5};
  for (auto _ : state) {
    SolutionProfile prof = integrate(spec, start, 20.0);
    benchmark::DoNotOptimize(prof.alpha.back());
  }
}
BENCHMARK(BM_integrate_hyperbolic)->Unit(benchmark::kMillisecond);

void BM_picard_startup(benchmark::State& state) {
  const ProblemSpec spec = hyperbolic_pair(3, 4.0);
  for (auto _ : state) {
    LocalSolution sol = picard_solve(spec, 1.0);
    benchmark::DoNotOptimize(sol.worst_residual);
  }
}
BENCHMARK(BM_picard_startup)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
