#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "penet/encoder.hpp"
#include "penet/model_gradcheck.hpp"

namespace penet {
namespace {

using oracle::random_tensor;

Encoder<float> seeded_encoder(std::size_t din, std::size_t k, int depth, std::uint64_t seed) {
  Encoder<float> enc(din, k, depth);
  Rng rng(seed);
  enc.init(rng);
  // Non-zero biases so the oracle comparison covers them.
  for (auto& layer : enc.layers)
    for (float& b : layer.bias.value.data()) b = static_cast<float>(rng.uniform(-0.1, 0.1));
  return enc;
}

std::vector<double> oracle_embed(const Encoder<float>& enc, std::span<const float> p) {
  std::vector<Tensor<double>> w, b;
  for (const auto& layer : enc.layers) {
    w.push_back(layer.weight.value.cast<double>());
    b.push_back(layer.bias.value.cast<double>());
  }
  std::vector<double> pd(p.begin(), p.end());
  return oracle::mlp_point(pd, w, b);
}

TEST(Encoder, CanonicalWidths) {
  EXPECT_EQ(encoder_widths(6, 1024, 3), (std::vector<std::size_t>{6, 64, 128, 1024}));
  EXPECT_EQ(encoder_widths(3, 1024, 1), (std::vector<std::size_t>{3, 1024}));
  EXPECT_EQ(encoder_widths(3, 1024, 2), (std::vector<std::size_t>{3, 128, 1024}));
  EXPECT_EQ(encoder_widths(3, 1024, 4), (std::vector<std::size_t>{3, 64, 128, 256, 1024}));
  EXPECT_EQ(encoder_widths(3, 1024, 5), (std::vector<std::size_t>{3, 64, 128, 256, 512, 1024}));
  EXPECT_THROW(encoder_widths(3, 1024, 0), ConfigError);
  EXPECT_THROW(encoder_widths(3, 1024, 6), ConfigError);
}

TEST(Encoder, ZeroWeightsGiveZeroVector) {
  Encoder<float> enc(3, 64, 3);
  const float p[] = {0.3f, -1.f, 2.f};
  const auto e = enc.embed_point(p);
  for (float v : e.data()) EXPECT_EQ(v, 0.f);
}

TEST(Encoder, OutputLengthIsK) {
  auto enc = seeded_encoder(6, 1024, 3, 1);
  const float p[] = {0.1f, 0.2f, 0.3f, 0, 0, 1};
  EXPECT_EQ(enc.embed_point(p).size(), 1024u);
}

TEST(Encoder, EmbedPointMatchesMatmulChain) {
  auto enc = seeded_encoder(6, 1024, 3, 2);
  const float p[] = {0.1f, 0.2f, 0.3f, 0, 0, 1};
  const auto got = enc.embed_point(p);
  const auto want = oracle_embed(enc, p);
  for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(got[j], want[j], 1e-6);
}

TEST(Encoder, DinMismatch) {
  auto enc = seeded_encoder(3, 16, 3, 3);
  const float p[] = {1, 2};
  EXPECT_THROW(enc.embed_point(p), DimensionError);
  EXPECT_THROW(enc.embed_batch(Tensor<float>({4, 6}), {2, 2}), DimensionError);
}

TEST(Encoder, DegenerateBatchEqualsSinglePoint) {
  auto enc = seeded_encoder(3, 64, 3, 4);
  auto x = Tensor<float>::matrix({{0.5f, -0.2f, 0.9f}});
  EXPECT_EQ(enc.embed_batch(x, {1, 1}), enc.embed_point(x.row(0)).reshaped({1, 64}));
}

TEST(Encoder, BatchRowsMatchPerPointLoop) {
  auto enc = seeded_encoder(3, 256, 3, 5);
  Rng rng(6);
  auto x = random_tensor<float>({6, 3}, rng);
  const auto out = enc.embed_batch(x, {2, 3});
  for (std::size_t i = 0; i < 6; ++i) {
    const auto want = oracle_embed(enc, x.row(i));
    for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(out(i, j), want[j], 1e-6);
  }
}

TEST(Encoder, LayoutMismatch) {
  auto enc = seeded_encoder(3, 16, 3, 7);
  EXPECT_THROW(enc.embed_batch(Tensor<float>({5, 3}), {2, 3}), LayoutError);
}

TEST(Encoder, RowPermutationPermutesOutput) {
  auto enc = seeded_encoder(3, 64, 3, 8);
  Rng rng(9);
  auto x = random_tensor<float>({10, 3}, rng);
  std::vector<std::size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = 9; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Tensor<float> px({10, 3});
  for (std::size_t i = 0; i < 10; ++i) std::copy_n(x.row(perm[i]).begin(), 3, px.row(i).begin());
  const auto a = enc.embed_batch(x, {1, 10}), b = enc.embed_batch(px, {1, 10});
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(b(i, j), a(perm[i], j));
}

TEST(Encoder, RowsAreIndependent) {
  auto enc = seeded_encoder(3, 128, 3, 10);
  Rng rng(11);
  auto x = random_tensor<float>({8, 3}, rng);
  const auto base = enc.embed_batch(x, {2, 4});
  for (std::size_t other = 0; other < 8; ++other) {
    if (other == 3) continue;
    auto y = x;
    for (float& v : y.row(other)) v += 0.7f;
    const auto out = enc.embed_batch(y, {2, 4});
    for (std::size_t j = 0; j < 128; ++j) EXPECT_EQ(out(3, j), base(3, j));
  }
}

TEST(SplitRows, CloudMajorLayout) {
  auto flat = Tensor<float>::matrix({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  auto s = split_rows(flat, {2, 2});
  EXPECT_EQ(s.shape(), (Shape{2, 2, 2}));
  EXPECT_EQ(s(0, 1, 0), 1.f);
  EXPECT_EQ(s(1, 0, 0), 2.f);
  EXPECT_EQ(split_rows(flat, {1, 4}).shape(), (Shape{1, 4, 2}));
  EXPECT_EQ(s.reshaped({4, 2}), flat);
  EXPECT_THROW(split_rows(flat, {3, 2}), LayoutError);
}

TEST(Encoder, BackwardBeforeForwardIsStateError) {
  Encoder<double> enc(3, 16, 3);
  EncoderTrace<double> empty;
  EXPECT_THROW(enc.backward(empty, Tensor<double>({2, 16}), nullptr), StateError);
}

class EncoderDepth : public ::testing::TestWithParam<int> {};

TEST_P(EncoderDepth, ClassifyPipelinePassesGradCheck) {
  ModelConfig cfg;
  cfg.encoder_depth = GetParam();
  cfg.num_classes = 4;
  auto r = check_model_gradients(cfg);
  EXPECT_TRUE(r.passed) << r.worst.param << "[" << r.worst.index << "] " << r.max_rel_error << " skipped " << r.skipped;
}

INSTANTIATE_TEST_SUITE_P(AllDepths, EncoderDepth, ::testing::Values(1, 2, 3, 4, 5));

}  // namespace
}  // namespace penet
