#include <benchmark/benchmark.h>

#include "annealed/oracle.hpp"
#include "annealed/sampler.hpp"

using namespace annealed;

namespace {

InterpolationLaw mixture_law(int d) {
  return InterpolationLaw(Potential::gaussian_mixture({0.5, 0.5}, {Vector::Constant(d, -1.0), Vector::Constant(d, 1.0)}, 0.5),
                          Potential::gaussian(1.0, d), Schedule::quadratic_piecewise(1.0));
}

void BM_ClosedFormScore(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const InterpolationLaw law = mixture_law(d);
  const Vector x = Vector::Constant(d, 0.3);
  Vector out(d);
  for (auto _ : state) {
    law.closed_form_score(0.4, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ClosedFormScore)->Arg(1)->Arg(10)->Arg(100);

void BM_SnisScore(benchmark::State& state) {
  const InterpolationLaw law(Potential::student(3.0, 1.0, 2), Potential::gaussian(1.0, 2),
                             Schedule::quadratic_piecewise(1.0));
  SnisConfig cfg;
  cfg.particles = static_cast<int>(state.range(0));
  const Vector x = Vector::Constant(2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(snis_score(law, 0.5, x, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SnisScore)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_ConditionalOracle(benchmark::State& state) {
  const InterpolationLaw law(Potential::student(3.0, 1.0, 1), Potential::gaussian(1.0, 1),
                             Schedule::quadratic_piecewise(1.0));
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_poincare_oracle(law, 0.5, 1.0, nodes).c_p);
}
BENCHMARK(BM_ConditionalOracle)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_RunAnnealed(benchmark::State& state) {
  SdeRun run{mixture_law(2)};
  run.steps = 200;
  run.chains = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_annealed(run).terminal.data());
  state.SetItemsProcessed(state.iterations() * run.steps * run.chains);
}
BENCHMARK(BM_RunAnnealed)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
