#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ueba/autoencoder.hpp"
#include "ueba/doc2vec.hpp"
#include "ueba/eval/tsne.hpp"
#include "ueba/nn/adam.hpp"
#include "ueba/nn/gradients.hpp"
#include "ueba/rng.hpp"

namespace {

using namespace ueba;

ae::AutoencoderModel default_model() { return ae::build(ae::AutoencoderSpec{}, 42); }

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

void bm_forward_pass(benchmark::State& state) {
  auto model = default_model();
  auto net = model.combined();
  auto batch = random_batch(1, 83, 1);
  std::vector<double> x(batch.row(0), batch.row(0) + 83);
  for (auto _ : state) {
    auto y = nn::forward_composition(net, x);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(bm_forward_pass);

void bm_gradient_batch(benchmark::State& state) {
  auto model = default_model();
  auto net = model.combined();
  auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 83, 2);
  for (auto _ : state) {
    auto g = nn::gradients(net, batch, 1e-3);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(bm_gradient_batch)->Arg(8)->Arg(64)->Arg(256);

void bm_adam_step(benchmark::State& state) {
  auto model = default_model();
  auto net = model.combined();
  auto batch = random_batch(64, 83, 3);
  auto g = nn::gradients(net, batch, 1e-3);
  auto adam = nn::AdamState::init(net);
  for (auto _ : state) {
    nn::adam_step(net, g, adam);
    benchmark::DoNotOptimize(net);
  }
}
BENCHMARK(bm_adam_step);

void bm_score(benchmark::State& state) {
  auto model = default_model();
  auto batch = random_batch(1, 83, 4);
  std::vector<double> x(batch.row(0), batch.row(0) + 83);
  for (auto _ : state) {
    auto r = ae::score(model, x);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_score);

void bm_infer_vector(benchmark::State& state) {
  std::vector<d2v::TokenSequence> corpus;
  Rng rng(5);
  std::uniform_int_distribution<int> pick(0, 39);
  for (int d = 0; d < 200; ++d) {
    d2v::TokenSequence doc;
    for (int t = 0; t < 12; ++t) doc.push_back("proc" + std::to_string(pick(rng)));
    corpus.push_back(std::move(doc));
  }
  d2v::Doc2VecParams params;
  params.epochs = 3;
  params.seed = 5;
  auto model = d2v::train_dbow(corpus, params);
  for (auto _ : state) {
    auto v = d2v::infer_vector(model, corpus[0], 50, 9);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_infer_vector);

void bm_tsne_small(benchmark::State& state) {
  auto X = random_batch(static_cast<std::size_t>(state.range(0)), 16, 6);
  eval::TsneConfig cfg;
  cfg.perplexity = 10.0;
  cfg.iterations = 50;
  cfg.exaggeration_iterations = 20;
  cfg.seed = 6;
  for (auto _ : state) {
    auto emb = eval::tsne(X, cfg);
    benchmark::DoNotOptimize(emb);
  }
}
BENCHMARK(bm_tsne_small)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
