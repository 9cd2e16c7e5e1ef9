#include <benchmark/benchmark.h>

#include <vector>

#include "penet/kernels.hpp"
#include "penet/model.hpp"
#include "penet/optimizer.hpp"
#include "penet/rng.hpp"
#include "penet/sampling.hpp"

namespace {

using namespace penet;

Tensor<float> random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor<float> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

void BM_LinearForward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto in = static_cast<std::size_t>(state.range(1));
  const auto out = static_cast<std::size_t>(state.range(2));
  const auto x = random_tensor({m, in}, 1);
  const auto w = random_tensor({in, out}, 2);
  const auto b = random_tensor({out}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(linear_forward(x, w, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 2 * m * in * out));
}
BENCHMARK(BM_LinearForward)->Args({2048, 64, 128})->Args({2048, 128, 256})->Args({8, 512, 1024});

void BM_EmbedBatch(benchmark::State& state) {
  const auto points = static_cast<std::size_t>(state.range(0));
  Encoder<float> enc(3, 1024, 3);
  Rng rng(4);
  enc.init(rng);
  const BatchLayout layout{8, points};
  const auto x = random_tensor({layout.rows(), 3}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(enc.embed_batch(x, layout));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * layout.rows()));
}
BENCHMARK(BM_EmbedBatch)->Arg(256)->Arg(1024);

void BM_FarthestPoints(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  std::vector<Vec3> cloud(4 * n);
  for (auto& p : cloud) {
    p = {static_cast<float>(rng.uniform(-1.0, 1.0)), static_cast<float>(rng.uniform(-1.0, 1.0)),
         static_cast<float>(rng.uniform(-1.0, 1.0))};
  }
  for (auto _ : state) benchmark::DoNotOptimize(farthest_point_indices(cloud, n));
}
BENCHMARK(BM_FarthestPoints)->Arg(256)->Arg(1024);

void BM_TrainStep(benchmark::State& state) {
  ModelConfig cfg;
  cfg.num_classes = 10;
  PeNet<float> model(cfg);
  model.init(7);
  const BatchLayout layout{8, 256};
  const auto x = random_tensor({layout.rows(), 3}, 8);
  const std::vector<int> labels{0, 1, 2, 3, 4, 5, 6, 7};
  OptimizerState<float> opt;
  const auto params = model.params();
  for (auto _ : state) {
    ForwardTrace<float> trace;
    const auto logits = model.forward(x, layout, &trace);
    const auto loss = softmax_cross_entropy(logits, labels);
    zero_grads(params);
    model.backward(trace, loss.grad);
    optimizer_step(params, opt);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
