#include <benchmark/benchmark.h>

#include "wisig/dichotomy.hpp"
#include "wisig/metrics.hpp"
#include "wisig/protocol.hpp"
#include "wisig/svm.hpp"
#include "wisig/synthetic.hpp"

using namespace wisig;

namespace {

const Dataset& shared_dataset() {
  static const Dataset ds = generate_synthetic(SyntheticSpec{});
  return ds;
}

void BM_LearningSet(benchmark::State& state) {
  const auto& ds = shared_dataset();
  const auto cfg = ProtocolConfig::synthetic();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_learning_set(ds, cfg, learning_set_stream(0, 0)));
  }
}
BENCHMARK(BM_LearningSet)->Unit(benchmark::kMillisecond);

void BM_Dichotomy(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = rng.normal();
    b[k] = rng.normal();
  }
  const FeatureVector fa(a), fb(b);
  for (auto _ : state) benchmark::DoNotOptimize(dichotomy_transform(fa, fb));
}
BENCHMARK(BM_Dichotomy)->Arg(32)->Arg(2048);

void BM_Train(benchmark::State& state) {
  const auto& ds = shared_dataset();
  auto cfg = ProtocolConfig::synthetic();
  // Keep both classes: take from the front (within) and the back (between).
  const auto full = build_learning_set(ds, cfg, learning_set_stream(0, 0));
  std::vector<DissimilarityVector> ls(full.begin(), full.begin() + state.range(0) / 2);
  ls.insert(ls.end(), full.end() - state.range(0) / 2, full.end());
  for (auto _ : state) benchmark::DoNotOptimize(train(ls, cfg.svm));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(500)->Arg(2640)->Unit(benchmark::kMillisecond);

void BM_GlobalThreshold(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> g(static_cast<std::size_t>(state.range(0))), f(g.size());
  for (auto& s : g) s = rng.normal() + 1.0;
  for (auto& s : f) s = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(global_threshold(g, f));
}
BENCHMARK(BM_GlobalThreshold)->Arg(200)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
