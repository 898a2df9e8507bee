// Serial reference vs parallel kernels on a C1 sample.

#include <benchmark/benchmark.h>

#include "lsboost/datagen.hpp"
#include "lsboost/model.hpp"
#include "lsboost/train.hpp"
#include "reference.hpp"

using namespace lsboost;

namespace {

const Dataset& sample(std::size_t n) {
  static const Dataset small = sample_surface(SurfaceSpec{Surface::C1, 20000, 3, 0.0, 1}).data;
  static const Dataset large = sample_surface(SurfaceSpec{Surface::C1, 100000, 3, 0.0, 1}).data;
  return n <= 20000 ? small : large;
}

TrainConfig config(int threads) {
  TrainConfig cfg;
  cfg.alpha = 0.005;
  cfg.oracle = OracleSpec::tree(3);
  cfg.thread_count = threads;
  return cfg;
}

const LevelSetModel& trained_model() {
  static const LevelSetModel model = train(sample(20000), config(1)).model;
  return model;
}

void BM_TrainReference(benchmark::State& state) {
  const Dataset& d = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::train(d, config(1)));
}

void BM_TrainParallel(benchmark::State& state) {
  const Dataset& d = sample(static_cast<std::size_t>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(train(d, config(threads)));
}

void BM_PredictReference(benchmark::State& state) {
  const Dataset& d = sample(100000);
  for (auto _ : state) benchmark::DoNotOptimize(reference::predict_all(trained_model(), d));
}

void BM_PredictParallel(benchmark::State& state) {
  const Dataset& d = sample(100000);
  for (auto _ : state) benchmark::DoNotOptimize(predict_all(trained_model(), d));
}

}  // namespace

BENCHMARK(BM_TrainReference)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainParallel)->Args({20000, 1})->Args({20000, 4})->Args({20000, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
