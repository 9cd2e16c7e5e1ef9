#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "penet/checkpoint.hpp"
#include "penet/errors.hpp"
#include "scratch_dir.hpp"

namespace penet {
namespace {

PeNet<float> trained_looking_model(Task task) {
  ModelConfig cfg;
  cfg.task = task;
  cfg.din = 6;
  cfg.k = 256;
  cfg.encoder_depth = 3;
  cfg.train_points = 64;
  if (task == Task::kClassify) {
    cfg.num_classes = 3;
    cfg.class_names = {"alpha", "beta", "gamma"};
  } else {
    cfg.num_parts = 5;
  }
  PeNet<float> m(cfg);
  m.init(41);
  // Perturb biases so zero initialisation cannot hide ordering bugs.
  Rng rng(5);
  for (auto* p : m.params()) {
    for (float& v : p->value.data()) v += static_cast<float>(rng.uniform(-0.01, 0.01));
  }
  return m;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Checkpoint, SaveLoadSaveByteIdentical) {
  test::ScratchDir dir;
  for (Task task : {Task::kClassify, Task::kSegment}) {
    const auto model = trained_looking_model(task);
    save_checkpoint(model, dir / "a.ckpt");
    const auto loaded = load_checkpoint(dir / "a.ckpt");
    save_checkpoint(loaded, dir / "b.ckpt");
    EXPECT_EQ(read_bytes(dir / "a.ckpt"), read_bytes(dir / "b.ckpt"));
    EXPECT_EQ(loaded.config(), model.config());
    const auto src = model.params();
    const auto dst = loaded.params();
    ASSERT_EQ(src.size(), dst.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      EXPECT_EQ(src[i]->name, dst[i]->name);
      ASSERT_EQ(src[i]->value.shape(), dst[i]->value.shape());
      EXPECT_EQ(std::memcmp(src[i]->value.raw(), dst[i]->value.raw(), src[i]->value.size() * sizeof(float)), 0);
    }
  }
}

TEST(Checkpoint, PredictionsBitIdenticalAfterReload) {
  const auto model = trained_looking_model(Task::kClassify);
  const auto loaded = deserialize_checkpoint(serialize_checkpoint(model));
  Rng rng(8);
  const BatchLayout layout{3, 64};
  const auto x = oracle::random_tensor<float>({layout.rows(), 6}, rng);
  const auto a = model.forward(x, layout);
  const auto b = loaded.forward(x, layout);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(std::memcmp(a.raw(), b.raw(), a.size() * sizeof(float)), 0);
}

TEST(Checkpoint, StartsWithMagicAndVersion) {
  const auto bytes = serialize_checkpoint(trained_looking_model(Task::kClassify));
  ASSERT_GE(bytes.size(), 10u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "PENET1");
  EXPECT_EQ(bytes[6], kCheckpointVersion);
  EXPECT_EQ(bytes[7] | bytes[8] | bytes[9], 0);
}

TEST(Checkpoint, EveryTruncationRejected) {
  const auto bytes = serialize_checkpoint(trained_looking_model(Task::kSegment));
  // Every prefix is malformed; probing a spread of cut points keeps this fast.
  for (std::size_t cut = 0; cut < bytes.size(); cut += 1 + cut / 4) {
    EXPECT_THROW(deserialize_checkpoint(std::span(bytes.data(), cut)), FormatError) << "cut at " << cut;
  }
}

TEST(Checkpoint, BadMagicAndVersion) {
  auto bytes = serialize_checkpoint(trained_looking_model(Task::kClassify));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version[6] = 99;
  try {
    deserialize_checkpoint(bad_version);
    FAIL() << "unknown version accepted";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, TrailingBytesRejected) {
  auto bytes = serialize_checkpoint(trained_looking_model(Task::kClassify));
  bytes.push_back(0);
  EXPECT_THROW(deserialize_checkpoint(bytes), FormatError);
}

TEST(Checkpoint, MissingFileIsIoError) {
  test::ScratchDir dir;
  EXPECT_THROW(load_checkpoint(dir / "absent.ckpt"), IoError);
}

}  // namespace
}  // namespace penet
