#include <benchmark/benchmark.h>

#include "despeckle/dtcwt.hpp"
#include "despeckle/kernels.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/reference.hpp"
#include "despeckle/specksim.hpp"

using namespace despeckle;

namespace {

Image noisy_input(int n) {
  SpeckleSpec spec;
  spec.seed = 1;
  return apply_speckle(generate_phantom(n, n, PhantomKind::disks), spec);
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

void BM_BoxMean(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::box_mean(img, 7, exec));
}

void BM_BoxMeanReference(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::box_mean(img, 7));
}

void BM_Frost(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::frost(img, 5, 1.0, exec));
}

void BM_FrostReference(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::frost(img, 5, 1.0));
}

void BM_DtcwtRoundTrip(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  const Exec exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dtcwt_inverse(dtcwt_forward(img, 3, default_filter_bank(), exec), default_filter_bank(), exec));
  }
}

void BM_Speckle(benchmark::State& state) {
  const Image img = generate_phantom(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                                     PhantomKind::blocks);
  SpeckleSpec spec;
  spec.mode = SpeckleMode::correlated;
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(apply_speckle(img, spec, exec));
}

void BM_Despeckle(benchmark::State& state) {
  const Image img = noisy_input(static_cast<int>(state.range(0)));
  PipelineConfig cfg;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(despeckle::despeckle(img, cfg));
}

}  // namespace

// Second argument: 0 = serial, 1 = parallel.
BENCHMARK(BM_BoxMean)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoxMeanReference)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Frost)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrostReference)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DtcwtRoundTrip)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Speckle)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Despeckle)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
