#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "penet/dataset.hpp"
#include "penet/model.hpp"
#include "penet/optimizer.hpp"
#include "penet/sampling.hpp"

namespace penet {

enum class LrSchedule { kConstant, kStep };

struct TrainConfig {
  Task task = Task::kClassify;
  std::size_t epochs = 20;
  std::size_t batch_size = 8;
  /// Fixed training point count N (FPS per cloud).
  std::size_t points = 1024;
  std::size_t k = 1024;
  int encoder_depth = 3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  LrSchedule lr_schedule = LrSchedule::kConstant;
  /// Step schedule: lr·gamma^floor(epoch/lr_step).
  std::size_t lr_step = 10;
  double lr_gamma = 0.5;
  std::uint64_t seed = 1;
  bool augment = true;
  /// The seed field is ignored; each sample draws hash(seed, epoch, index).
  AugmentConfig augmentation;
  std::size_t threads = 1;

  void validate() const;
  double learning_rate_at(std::size_t epoch) const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  /// NaN when no validation split was given.
  double val_acc = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  PeNet<float> model;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains a model from scratch. Each step: FPS to N → normalize → augment →
/// encoder → global feature → head → softmax cross-entropy → optimizer.
/// Deterministic for a fixed seed.
TrainResult train(const Dataset& train_set, const Dataset* val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// CSV with header "epoch,loss,train_acc,val_acc,seconds".
std::string format_train_log(std::span<const EpochLog> log);

}  // namespace penet
