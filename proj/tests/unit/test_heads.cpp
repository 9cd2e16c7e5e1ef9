#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "penet/heads.hpp"

namespace penet {
namespace {

using oracle::random_tensor;

template <typename Layer>
void randomize(Layer& layer, Rng& rng) {
  for (auto* t : {&layer.weight.value, &layer.bias.value})
    for (float& v : t->data()) v = static_cast<float>(rng.uniform(-0.3, 0.3));
}

TEST(ReshapeGrid, RowMajor) {
  Tensor<float> f({1024});
  std::iota(f.data().begin(), f.data().end(), 0.f);
  const auto g = reshape_grid(f);
  EXPECT_EQ(g.shape(), (Shape{1, 32, 32}));
  EXPECT_EQ(g(0, 0, 0), 0.f);
  EXPECT_EQ(g(0, 1, 1), 33.f);
  EXPECT_EQ(g.reshaped({1024}), f);
  EXPECT_EQ(reshape_grid(Tensor<float>({3, 16})).shape(), (Shape{3, 1, 4, 4}));
}

TEST(ReshapeGrid, NonSquare) {
  EXPECT_THROW(grid_side(1000), DimensionError);
  EXPECT_EQ(grid_side(1024), 32u);
  EXPECT_THROW(reshape_grid(Tensor<float>({1000})), DimensionError);
}

TEST(ClassHead, ZeroWeightsZeroLogits) {
  ClassHead<float> head(32, 40);
  Rng rng(1);
  const auto logits = head.forward(random_tensor<float>({2, 1, 32, 32}, rng), nullptr);
  EXPECT_EQ(logits.shape(), (Shape{2, 40}));
  for (float v : logits.data()) EXPECT_EQ(v, 0.f);
  EXPECT_EQ(predict(logits), (std::vector<int>{0, 0}));
}

TEST(ClassHead, OutputWidth) {
  ClassHead<float> head(32, 10);
  EXPECT_EQ(head.forward(Tensor<float>({1, 1, 32, 32}), nullptr).shape(), (Shape{1, 10}));
  EXPECT_EQ(head.fc1.in_features(), 32u * 8 * 8);
}

TEST(ClassHead, ShapeMismatch) {
  ClassHead<float> head(32, 10);
  EXPECT_THROW(head.forward(Tensor<float>({1, 1, 16, 16}), nullptr), DimensionError);
}

TEST(ClassHead, MatchesLayerByLayerOracle) {
  ClassHead<float> head(16, 5);
  Rng rng(2);
  randomize(head.conv1, rng);
  randomize(head.conv2, rng);
  randomize(head.fc1, rng);
  randomize(head.fc2, rng);
  const auto x = random_tensor<float>({3, 1, 16, 16}, rng, 0, 1);
  const auto got = head.forward(x, nullptr);

  auto d = [](const Tensor<float>& t) { return t.cast<double>(); };
  auto h = oracle::maxpool2d(
      oracle::relu(oracle::conv2d(d(x), d(head.conv1.weight.value), d(head.conv1.bias.value), 1, 1)), 2, 2);
  h = oracle::maxpool2d(oracle::relu(oracle::conv2d(h, d(head.conv2.weight.value), d(head.conv2.bias.value), 1, 1)),
                        2, 2);
  h.reshape({3, h.size() / 3});
  h = oracle::relu(oracle::affine(h, d(head.fc1.weight.value), d(head.fc1.bias.value)));
  h = oracle::affine(h, d(head.fc2.weight.value), d(head.fc2.bias.value));
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(got[i], h[i], 1e-5);
}

TEST(SegHead, ZeroWeightsZeroLogits) {
  SegHead<float> head(16, 128, 50);
  Rng rng(3);
  const auto logits =
      head.forward(random_tensor<float>({6, 128}, rng), random_tensor<float>({2, 16}, rng), {2, 3}, nullptr);
  EXPECT_EQ(logits.shape(), (Shape{6, 50}));
  for (float v : logits.data()) EXPECT_EQ(v, 0.f);
}

TEST(SegHead, PermutationEquivariant) {
  SegHead<float> head(16, 128, 7);
  Rng rng(4);
  head.init(rng);
  const auto local = random_tensor<float>({9, 128}, rng);
  const auto global = random_tensor<float>({1, 16}, rng, 0, 1);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0u);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[5]);
  Tensor<float> plocal({9, 128});
  for (std::size_t i = 0; i < 9; ++i) std::copy_n(local.row(perm[i]).begin(), 128, plocal.row(i).begin());
  const auto a = head.forward(local, global, {1, 9}, nullptr);
  const auto b = head.forward(plocal, global, {1, 9}, nullptr);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(b(i, j), a(perm[i], j));
}

TEST(SegHead, EmptyCloud) {
  SegHead<float> head(16, 128, 3);
  EXPECT_THROW(head.forward(Tensor<float>{}, Tensor<float>({1, 16}), {1, 0}, nullptr), EmptyCloudError);
}

TEST(Heads, BackwardBeforeForward) {
  ClassHead<double> cls(4, 2);
  EXPECT_THROW(cls.backward(ClassHeadTrace<double>{}, Tensor<double>({1, 2})), StateError);
  SegHead<double> seg(16, 128, 2);
  EXPECT_THROW(seg.backward(SegHeadTrace<double>{}, Tensor<double>({1, 2})), StateError);
}

TEST(Predict, ArgmaxWithLowTieBreak) {
  EXPECT_EQ(predict(Tensor<float>::matrix({{0.1f, 0.9f}})), std::vector<int>{1});
  EXPECT_EQ(predict(Tensor<float>::matrix({{0.5f, 0.5f}})), std::vector<int>{0});
  EXPECT_EQ(predict(Tensor<float>({5, 3})).size(), 5u);
}

}  // namespace
}  // namespace penet
