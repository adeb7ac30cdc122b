// Serial reference vs OpenMP paths of the two parallel kernels: the empirical
// variogram (one task per conditioning coordinate) and a cross-validation sweep
// (one task per fold x spec x lambda cell). Both paths give identical results;
// only wall time differs.

#include "golazo/extremes.hpp"
#include "golazo/select.hpp"
#include "golazo/simgen.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace golazo;

namespace {

SampleBlock hr_samples(Index d, Index n) {
  std::mt19937_64 rng(11);
  const LatentModel model = latent_cycle_hr(d, 1, rng);
  return sample_hr_pareto(*model.gamma_oo, n, rng);
}

void BM_Variogram(benchmark::State& state, Exec exec) {
  const SampleBlock x = hr_samples(state.range(0), 20000);
  const Index k = exceedance_count(x.rows(), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_variogram(x, k, exec));
}

void BM_VariogramPareto(benchmark::State& state, Exec exec) {
  const SampleBlock x = hr_samples(state.range(0), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_variogram_pareto(x, exec));
}

void BM_KfoldSweep(benchmark::State& state, Exec exec) {
  const SampleBlock x = hr_samples(8, 2000);
  CvOptions opt;
  opt.mode = FitMode::hr;
  opt.grid = GridSpec{0.01, 0.16, static_cast<int>(state.range(0)), GridScale::log, 0.25};
  PenaltySpec lasso, emtp2;
  emtp2.kind = PenaltyKind::sparse_positive;
  opt.specs = {lasso, emtp2};
  opt.variogram.scale = VariogramScale::pareto;
  opt.params.max_iter = 2000;
  opt.folds = 3;
  for (auto _ : state) benchmark::DoNotOptimize(kfold_cv(x, opt, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Variogram, serial, Exec::serial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Variogram, parallel, Exec::parallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VariogramPareto, serial, Exec::serial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VariogramPareto, parallel, Exec::parallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_KfoldSweep, serial, Exec::serial)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_CAPTURE(BM_KfoldSweep, parallel, Exec::parallel)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
