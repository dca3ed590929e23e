// Microbenchmarks for the numerical kernels that dominate experiment runtime.

#include <benchmark/benchmark.h>

#include "gcsr/gc.hpp"
#include "gcsr/null_dist.hpp"
#include "gcsr/sampling.hpp"
#include "gcsr/var_model.hpp"

namespace {

gcsr::VarParams figure_model() {
  gcsr::SplitRng rng(424242);
  return gcsr::random_var(8, 7, {3, 5}, 0.9, 1.0, std::nullopt, rng);
}

void BM_SolveDlyap(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  gcsr::SplitRng rng(1);
  gcsr::Matrix A(m, m), G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      A(i, j) = rng.gaussian();
      G(i, j) = rng.gaussian();
    }
  A *= 0.9 / gcsr::spectral_radius(A);
  const gcsr::Matrix Q = G * G.transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::solve_dlyap(A, Q));
}
BENCHMARK(BM_SolveDlyap)->Arg(8)->Arg(16)->Arg(35)->Arg(56);

void BM_ReducedSigma(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const gcsr::Partition part{3, 5};
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::reduced_sigma(m, part));
}
BENCHMARK(BM_ReducedSigma);

void BM_NullWeightsTime(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const gcsr::Partition part{3, 5};
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::null_weights_time(m, part));
}
BENCHMARK(BM_NullWeightsTime);

void BM_GenChi2Cdf(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const gcsr::GenChi2 law = gcsr::null_weights_time(m, {3, 5});
  const double x = gcsr::genchi2_moments(law).mu;
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::genchi2_cdf(law, x));
}
BENCHMARK(BM_GenChi2Cdf);

void BM_GenChi2Quantile(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const gcsr::GenChi2 law = gcsr::null_weights_time(m, {3, 5});
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::genchi2_quantile(law, 0.95));
}
BENCHMARK(BM_GenChi2Quantile);

void BM_SimulateAndFit(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const long burn = gcsr::default_burn_in(m);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    gcsr::SplitRng rng = gcsr::SplitRng(7).split(trial++);
    const gcsr::TimeSeries data = gcsr::simulate(m, 16384, burn, rng);
    benchmark::DoNotOptimize(gcsr::fit_var_ols(data, 7));
  }
}
BENCHMARK(BM_SimulateAndFit)->Unit(benchmark::kMillisecond);

void BM_GcBand(benchmark::State& state) {
  const gcsr::VarParams m = figure_model();
  const gcsr::Partition part{3, 5};
  const gcsr::FrequencyBand band{0.5, 2.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(gcsr::gc_band(m, part, band));
}
BENCHMARK(BM_GcBand)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
