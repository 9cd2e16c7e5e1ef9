#include <gtest/gtest.h>

#include "penet/rng.hpp"
#include "penet/tensor.hpp"

namespace penet {
namespace {

TEST(Tensor, ShapeProductMatchesData) {
  Tensor<float> t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_THROW(Tensor<float>({2, 3}, std::vector<float>(5)), DimensionError);
  EXPECT_THROW(Tensor<float>({2, 0}), DimensionError);
}

TEST(Tensor, RowMajorOffsets) {
  Tensor<int> t({2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<int>(i);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(t(a, b, c), static_cast<int>(a * 12 + b * 4 + c));
  EXPECT_THROW(t(0, 3, 0), DimensionError);
  EXPECT_THROW(t(0, 0), DimensionError);
}

TEST(Tensor, ReshapeKeepsData) {
  auto m = Tensor<float>::matrix({{1, 2, 3}, {4, 5, 6}});
  auto r = m.reshaped({3, 2});
  EXPECT_EQ(r(2, 1), 6.f);
  EXPECT_EQ(r.reshaped({2, 3}), m);
  EXPECT_THROW(m.reshaped({4}), DimensionError);
}

TEST(Tensor, RowViews) {
  auto m = Tensor<float>::matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(m.row(1)[0], 3.f);
  m.row(0)[1] = 9.f;
  EXPECT_EQ(m(0, 1), 9.f);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  Rng a(1), b(1);
  Rng c = a.split(5);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(c.next_u64(), Rng(1).split(6).next_u64());
}

TEST(Rng, RangesHold) {
  Rng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform_open(-0.05, 0.05);
    EXPECT_GT(u, -0.05);
    EXPECT_LT(u, 0.05);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(Rng, NormalMomentsRoughlyStandard) {
  Rng r(11);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, HashSeedIsOrderSensitive) {
  EXPECT_NE(hash_seed({1, 2}), hash_seed({2, 1}));
  EXPECT_EQ(hash_seed({1, 2, 3}), hash_seed({1, 2, 3}));
}

}  // namespace
}  // namespace penet
