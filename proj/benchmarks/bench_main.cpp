#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "surrogate/corpus.hpp"
#include "surrogate/forest.hpp"
#include "surrogate/mlp.hpp"
#include "surrogate/sampler.hpp"
#include "surrogate/svm.hpp"
#include "surrogate/target.hpp"
#include "surrogate/toyabm.hpp"

using namespace surrogate;

namespace {

struct Toy {
  Dataset data;
  std::vector<int> y;
  MarginalStats marginals;

  Toy() {
    const auto dir = std::filesystem::temp_directory_path() / "surrogate-bench-corpus";
    std::filesystem::remove_all(dir);
    const auto schema = toy_schema();
    generate_corpus(ToyWorld::create(schema, 1), schema, {}, dir);
    data = ingest(dir, schema);
    std::filesystem::remove_all(dir);
    y = label(data, RuleSet::baseline());
    marginals = fit_marginals(data);
  }
};

const Toy& toy() {
  static const Toy t;
  return t;
}

void BM_ForestTrain(benchmark::State& state) {
  ForestParams p;
  p.n_trees = static_cast<std::size_t>(state.range(0));
  const auto& t = toy();
  for (auto _ : state) benchmark::DoNotOptimize(ForestModel::train(t.data.X, t.y, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForestTrain)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  ForestParams p;
  p.n_trees = 500;
  const auto forest = ForestModel::train(toy().data.X, toy().y, p);
  const auto X = to_feature_matrix(toy().data.schema, generate(toy().marginals, toy().data.schema, state.range(0), 3));
  for (auto _ : state) benchmark::DoNotOptimize(forest.predict_proba(X));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForestPredict)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  const auto& t = toy();
  for (auto _ : state) benchmark::DoNotOptimize(generate(t.marginals, t.data.schema, state.range(0), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_MlpLossAndGrad(benchmark::State& state) {
  const std::vector<std::size_t> widths{toy().data.X.cols(), static_cast<std::size_t>(state.range(0)), 1};
  auto m = MlpModel::zeros(widths);
  std::vector<double> flat(m.parameter_count());
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 0.1);
  for (auto& v : flat) v = n(rng);
  m.set_flat_parameters(flat);
  for (auto _ : state) benchmark::DoNotOptimize(m.loss_and_grad(toy().data.X, toy().y, 1e-4));
}
BENCHMARK(BM_MlpLossAndGrad)->Arg(10)->Arg(100);

void BM_SmoTrain(benchmark::State& state) {
  std::vector<int> y_pm;
  for (int v : toy().y) y_pm.push_back(v ? 1 : -1);
  SvmParams p;
  for (auto _ : state) benchmark::DoNotOptimize(smo_train(toy().data.X, y_pm, p));
}
BENCHMARK(BM_SmoTrain)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
