#include <benchmark/benchmark.h>

#include <random>

#include "turnid/features.hpp"
#include "turnid/forest.hpp"
#include "turnid/ingest.hpp"
#include "turnid/rng.hpp"
#include "turnid/simgen.hpp"
#include "turnid/turndetect.hpp"

namespace {

using namespace turnid;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  return v;
}

void BM_HaarDwt(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(haar_dwt(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HaarDwt)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_FitPca(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < 32; ++i) rows.push_back(noise(n, 10 + i));
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(rows));
}
BENCHMARK(BM_FitPca)->Arg(64)->Arg(256)->Arg(512);

void BM_TrainForest(benchmark::State& state) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 80; ++i) {
    rows.push_back(noise(kFeatureCount, 100 + i));
    labels.push_back(i % 2 ? "a" : "b");
  }
  ForestParams p;
  p.tree_count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(rows, labels, p));
}
BENCHMARK(BM_TrainForest)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SimulateSession(benchmark::State& state) {
  const auto route = single_turn_route();
  const DriverStyle style;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_session(style, route, ++seed));
}
BENCHMARK(BM_SimulateSession)->Unit(benchmark::kMillisecond);

void BM_DetectTurns(benchmark::State& state) {
  const auto trace = densify(simulate_session(DriverStyle{}, single_turn_route(), 1).session);
  for (auto _ : state) benchmark::DoNotOptimize(detect_turns(trace));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.size()));
}
BENCHMARK(BM_DetectTurns);

}  // namespace

BENCHMARK_MAIN();
