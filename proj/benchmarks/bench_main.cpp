#include <benchmark/benchmark.h>

#include "asag/embedding.hpp"
#include "asag/gbdt.hpp"
#include "asag/nnet.hpp"
#include "asag/rng.hpp"
#include "asag/tpe.hpp"

using namespace asag;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = rng.uniform(-1, 1);
  return X;
}

Labels random_labels(Rng& rng, std::size_t n) {
  Labels y(n);
  for (auto& v : y) v = static_cast<int>(rng.below(2));
  return y;
}

void BM_SentenceEmbedding(benchmark::State& state) {
  Rng rng(1);
  embedding::VectorStore store(300);
  std::vector<double> v(300);
  for (int w = 0; w < 5000; ++w) {
    for (auto& x : v) x = rng.uniform(-1, 1);
    store.insert("w" + std::to_string(w), v);
  }
  std::vector<std::string> tokens;
  for (int i = 0; i < state.range(0); ++i) tokens.push_back("w" + std::to_string(rng.below(6000)));
  for (auto _ : state) benchmark::DoNotOptimize(embedding::sentence_embedding(tokens, store));
}
BENCHMARK(BM_SentenceEmbedding)->Arg(10)->Arg(50);

// One full-batch epoch of the base MLP on a question-sized training set.
void BM_MlpEpoch(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<int>(state.range(0));
  const auto X = random_matrix(rng, 268, 301);
  const auto y = random_labels(rng, 268);
  auto model = nnet::init_mlp({301, n, n, 2}, 3);
  nnet::AdamState adam(model.params().size());
  for (auto _ : state) {
    const auto lg = nnet::loss_and_grad(model, X, y);
    nnet::adam_step(model.params(), lg.grads, adam, 1e-3);
  }
}
BENCHMARK(BM_MlpEpoch)->Arg(100)->Arg(400);

void BM_GbdtTrain(benchmark::State& state) {
  Rng rng(4);
  const auto X = random_matrix(rng, 268, 301);
  const auto y = random_labels(rng, 268);
  gbdt::GbdtParams params;
  params.n_estimators = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::train_gbdt(X, y, params));
}
BENCHMARK(BM_GbdtTrain)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TpeSuggest(benchmark::State& state) {
  Rng rng(5);
  const auto space = default_space();
  std::vector<tpe::Trial> history;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
    tpe::Trial t;
    t.index = i;
    t.params = tpe::sample_uniform(space, rng);
    t.objective = rng.uniform();
    history.push_back(std::move(t));
  }
  for (auto _ : state) benchmark::DoNotOptimize(tpe::suggest(history, space, rng));
}
BENCHMARK(BM_TpeSuggest)->Arg(50)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
