#include <span>
#include <vector>

#include <benchmark/benchmark.h>

#include "dyno/de.hpp"
#include "dyno/harness.hpp"
#include "dyno/mlp.hpp"
#include "dyno/pca.hpp"
#include "dyno/stats.hpp"

namespace {

using namespace dyno;

class SphereEvaluator final : public Evaluator {
 public:
  Fitness evaluate(std::span<const double> x) override {
    double s = 0.0;
    for (double v : x) s += v * v;
    return {s, 0.0};
  }
  bool exhausted() const override { return false; }
  std::size_t period() const override { return 0; }
};

std::vector<TrainingSample> random_samples(std::size_t n, std::size_t d, std::size_t n_t,
                                           Rng& rng) {
  std::vector<TrainingSample> out(n);
  for (auto& s : out) {
    s.inputs.resize(d * n_t);
    s.target.resize(d);
    for (double& v : s.inputs) v = uniform(rng, -1.0, 1.0);
    for (double& v : s.target) v = uniform(rng, -1.0, 1.0);
  }
  return out;
}

void BM_DEGeneration(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  DEParams params;
  SphereEvaluator eval;
  Rng rng(1);
  auto pop = initialize_population(params, d, eval, rng);
  for (auto _ : state) benchmark::DoNotOptimize(de_generation(pop, params, eval, rng));
}
BENCHMARK(BM_DEGeneration)->Arg(30);

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const auto w = MLPWeights::random(30, 5, rng);
  const auto s = random_samples(1, 30, 5, rng).front();
  MLPWeights grad(30, 5);
  for (auto _ : state) benchmark::DoNotOptimize(sample_loss(w, s, &grad));
}
BENCHMARK(BM_ForwardBackward);

void BM_Train(benchmark::State& state) {
  Rng rng(3);
  const auto samples = random_samples(200, 30, 5, rng);
  for (auto _ : state) {
    auto w = MLPWeights::random(30, 5, rng);
    AdamState adam;
    benchmark::DoNotOptimize(train(w, adam, samples, 3, 4, rng));
  }
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

void BM_KruskalWallis(benchmark::State& state) {
  Rng rng(4);
  std::vector<std::vector<double>> groups(3, std::vector<double>(30));
  for (auto& g : groups) {
    for (double& v : g) v = uniform(rng, 0.0, 1.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kruskal_wallis(groups));
}
BENCHMARK(BM_KruskalWallis);

void BM_PCA(benchmark::State& state) {
  Rng rng(5);
  std::vector<std::vector<double>> points(100, std::vector<double>(30));
  for (auto& p : points) {
    for (double& v : p) v = uniform(rng, -5.0, 5.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pca_project_1d(points));
}
BENCHMARK(BM_PCA);

void BM_ExecuteRun(benchmark::State& state) {
  RunConfig c;
  c.periods = 20;
  c.method = ReactionMode::NNW;
  const auto table = best_known_for(c, std::nullopt);
  for (auto _ : state) benchmark::DoNotOptimize(execute_run(c, table));
}
BENCHMARK(BM_ExecuteRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
