#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "penet/idx.hpp"
#include "scratch_dir.hpp"

namespace penet {
namespace {

std::vector<std::uint8_t> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

void append(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

// One 2×3 image with label 7, built byte by byte.
struct Fixture {
  std::vector<std::uint8_t> images, labels;
  Fixture() {
    append(images, be32(0x803));
    append(images, be32(1));
    append(images, be32(2));
    append(images, be32(3));
    append(images, {0, 10, 255, 3, 0, 128});
    append(labels, be32(0x801));
    append(labels, be32(1));
    labels.push_back(7);
  }
};

TEST(Idx, HandBuiltFixtureRoundTrip) {
  Fixture f;
  const auto imgs = parse_idx(f.images, f.labels);
  ASSERT_EQ(imgs.size(), 1u);
  EXPECT_EQ(imgs[0].rows, 2u);
  EXPECT_EQ(imgs[0].cols, 3u);
  EXPECT_EQ(imgs[0].pixels, (std::vector<std::uint8_t>{0, 10, 255, 3, 0, 128}));
  EXPECT_EQ(imgs[0].label, 7);
  EXPECT_EQ(imgs[0].at(1, 2), 128);
  EXPECT_EQ(encode_idx_images(imgs), f.images);
  EXPECT_EQ(encode_idx_labels(imgs), f.labels);
}

TEST(Idx, BadMagicNamesOffset) {
  Fixture f;
  f.images[3] = 0x04;
  try {
    parse_idx(f.images, f.labels);
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("offset 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("0x00000804"), std::string::npos) << msg;
  }
}

TEST(Idx, TruncatedPixels) {
  Fixture f;
  f.images.pop_back();
  try {
    parse_idx(f.images, f.labels);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
  Fixture g;
  g.labels.resize(6);
  EXPECT_THROW(parse_idx(g.images, g.labels), FormatError);
}

TEST(Idx, CountMismatch) {
  Fixture f;
  f.labels = {};
  append(f.labels, be32(0x801));
  append(f.labels, be32(2));
  f.labels.push_back(1);
  f.labels.push_back(2);
  EXPECT_THROW(parse_idx(f.images, f.labels), FormatError);
}

TEST(Idx, BundledDigits) {
  const std::filesystem::path dir = PENET_DATA_DIR "/mnist";
  if (!std::filesystem::exists(dir / "digits-images-idx3-ubyte")) GTEST_SKIP() << "no bundled digits";
  const auto imgs = load_idx_images(dir / "digits-images-idx3-ubyte", dir / "digits-labels-idx1-ubyte");
  EXPECT_EQ(imgs.size(), 10000u);
  EXPECT_EQ(imgs[0].rows, 28u);
  for (const auto& im : imgs) {
    EXPECT_GE(im.label, 0);
    EXPECT_LE(im.label, 9);
  }
}

IdxImage blank(std::size_t rows = 28, std::size_t cols = 28) {
  IdxImage im;
  im.rows = rows;
  im.cols = cols;
  im.pixels.assign(rows * cols, 0);
  return im;
}

TEST(MnistPoints, SinglePixelRepeats) {
  auto im = blank();
  im.pixels[5 * 28 + 20] = 200;
  const auto c = mnist_to_pointcloud(im, 5, 1);
  ASSERT_EQ(c.size(), 5u);
  std::set<float> zs;
  for (const auto& p : c.points) {
    EXPECT_FLOAT_EQ(p.x, (20 - 13.5f) / 13.5f);
    EXPECT_FLOAT_EQ(p.y, (13.5f - 5) / 13.5f);
    zs.insert(p.z);
  }
  EXPECT_EQ(zs.size(), 5u);
  EXPECT_FALSE(c.has_normals());
}

TEST(MnistPoints, RangesAndLattice) {
  auto im = blank();
  im.pixels[0] = 1;
  im.pixels[27 * 28 + 27] = 1;
  im.pixels[14 * 28 + 3] = 1;
  const auto c = mnist_to_pointcloud(im, kMnistPoints, 2);
  EXPECT_EQ(c.size(), 5000u);
  for (const auto& p : c.points) {
    EXPECT_GE(p.x, -1.f);
    EXPECT_LE(p.x, 1.f);
    EXPECT_GE(p.y, -1.f);
    EXPECT_LE(p.y, 1.f);
    EXPECT_GT(p.z, -0.05f);
    EXPECT_LT(p.z, 0.05f);
    const float col = p.x * 13.5f + 13.5f, row = 13.5f - p.y * 13.5f;
    EXPECT_NEAR(col, std::round(col), 1e-4);
    EXPECT_NEAR(row, std::round(row), 1e-4);
  }
}

TEST(MnistPoints, AllZeroImage) {
  EXPECT_THROW(mnist_to_pointcloud(blank(), 10, 0), EmptyCloudError);
}

TEST(MnistPoints, Deterministic) {
  auto im = blank();
  for (std::size_t i = 100; i < 300; i += 7) im.pixels[i] = 255;
  EXPECT_EQ(mnist_to_pointcloud(im, 100, 9), mnist_to_pointcloud(im, 100, 9));
}

TEST(Idx, FileRoundTrip) {
  test::ScratchDir dir;
  Fixture f;
  {
    std::ofstream(dir / "i", std::ios::binary).write(reinterpret_cast<const char*>(f.images.data()), f.images.size());
    std::ofstream(dir / "l", std::ios::binary).write(reinterpret_cast<const char*>(f.labels.data()), f.labels.size());
  }
  EXPECT_EQ(load_idx_images(dir / "i", dir / "l").size(), 1u);
  EXPECT_THROW(load_idx_images(dir / "missing", dir / "l"), IoError);
}

}  // namespace
}  // namespace penet
