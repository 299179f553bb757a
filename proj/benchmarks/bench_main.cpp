#include <benchmark/benchmark.h>

#include <random>

#include "tsaae/diff/ops.hpp"
#include "tsaae/eval/dtw.hpp"
#include "tsaae/eval/tsne.hpp"
#include "tsaae/model/layers.hpp"
#include "tsaae/model/transformer.hpp"

using namespace tsaae;
using diff::Tensor;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  const Matrix m = random_matrix(rows, cols, seed);
  return Tensor::matrix(rows, cols, m.data());
}

}  // namespace

// NATOPS-sized series: 51 steps × 24 variables.
static void BM_DtwDistance(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(len, 24, 1), b = random_matrix(len, 24, 2);
  for (auto _ : state) benchmark::DoNotOptimize(eval::dtw_distance(a, b));
}
BENCHMARK(BM_DtwDistance)->Arg(20)->Arg(51)->Arg(100);

static void BM_AvgMinDtw(benchmark::State& state) {
  std::vector<data::MultivariateSeries> gen(50), ref(180);
  for (std::size_t i = 0; i < gen.size(); ++i) gen[i].values = random_matrix(51, 24, 10 + i);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i].values = random_matrix(51, 24, 100 + i);
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval::avg_min_dtw(gen, ref, threads).average);
}
BENCHMARK(BM_AvgMinDtw)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor(n, n, 3), b = random_tensor(n, n, 4);
  diff::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(diff::matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(24)->Arg(64)->Arg(128);

static void BM_MatmulBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  diff::ParameterStore store;
  Tensor a = store.add("a", {n, n}), b = store.add("b", {n, n});
  for (auto _ : state) {
    diff::backward(diff::sum(diff::matmul(a, b)));
    store.zero_grad();
  }
}
BENCHMARK(BM_MatmulBackward)->Arg(24)->Arg(64);

static void BM_Attention(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  diff::ParameterStore store;
  const auto params = model::AttentionParams::create(store, "attn", 24);
  std::mt19937_64 rng(5);
  for (auto& e : store.entries())
    for (auto& v : e.tensor.mutable_values()) v = std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
  const Tensor x = random_tensor(len, 24, 6);
  const Tensor mask = model::causal_mask(len);
  for (auto _ : state) benchmark::DoNotOptimize(model::multi_head_attention(x, x, x, mask, params, 8));
}
BENCHMARK(BM_Attention)->Arg(52);

static void BM_TransformerReconstruct(benchmark::State& state) {
  model::TransformerAutoencoder ae{model::TransformerConfig{}};
  std::mt19937_64 rng(7);
  ae.initialize(rng);
  data::MultivariateSeries s;
  s.values = random_matrix(51, 24, 8);
  const auto prepared = ae.prepare(s);
  for (auto _ : state) {
    const auto loss = model::frobenius_loss(ae.reconstruct(prepared));
    diff::backward(loss);
    ae.parameters().zero_grad();
  }
}
BENCHMARK(BM_TransformerReconstruct)->Unit(benchmark::kMillisecond);

static void BM_Tsne(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_matrix(n, 50, 9);
  eval::TsneConfig c;
  c.perplexity = 10.0;
  c.iterations = 250;
  for (auto _ : state) benchmark::DoNotOptimize(eval::tsne_embed(x, c).embedding);
}
BENCHMARK(BM_Tsne)->Arg(100)->Arg(230)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
