#include "penet/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "flush_denormals.hpp"
#include "penet/evaluate.hpp"
#include "penet/rng.hpp"

namespace penet {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (points == 0) throw ConfigError("points must be positive");
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (lr_schedule == LrSchedule::kStep && (lr_step == 0 || !(lr_gamma > 0))) {
    throw ConfigError("step schedule needs lr_step > 0 and lr_gamma > 0");
  }
  encoder_widths(3, k, encoder_depth);
  augmentation.validate();
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
  if (lr_schedule == LrSchedule::kConstant) return learning_rate;
  return learning_rate * std::pow(lr_gamma, static_cast<double>(epoch / lr_step));
}

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;     // "init"
constexpr std::uint64_t kShuffleStream = 0x73687566;  // "shuf"

ModelConfig model_config_for(const Dataset& data, const TrainConfig& cfg) {
  if (data.clouds.empty()) throw ConfigError("training set is empty");
  ModelConfig mc;
  mc.task = cfg.task;
  mc.din = data.clouds.front().din();
  mc.k = cfg.k;
  mc.encoder_depth = cfg.encoder_depth;
  mc.class_names = data.class_names;
  mc.num_classes = data.num_classes();
  mc.train_points = cfg.points;
  if (cfg.task == Task::kSegment) {
    if (!data.has_part_labels()) throw ConfigError("segmentation training needs per-point part labels");
    mc.num_parts = data.num_parts();
  }
  for (const auto& c : data.clouds) {
    if (c.din() != mc.din) throw ConfigError("training clouds mix 3- and 6-feature points ('" + c.name + "')");
    if (!c.class_label || *c.class_label < 0 || static_cast<std::size_t>(*c.class_label) >= mc.num_classes) {
      throw ConfigError("cloud '" + c.name + "' has a class id outside the " + std::to_string(mc.num_classes) +
                        " declared classes");
    }
  }
  return mc;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset* val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  const FlushDenormals flush;
  TrainResult result{PeNet<float>(model_config_for(train_set, cfg)), {}};
  PeNet<float>& model = result.model;
  model.init(hash_seed({cfg.seed, kInitStream}));

  std::vector<PointCloud> prepared;
  prepared.reserve(train_set.clouds.size());
  for (const auto& c : train_set.clouds) prepared.push_back(prepare_cloud(c, cfg.points));

  OptimizerState<float> opt;
  opt.kind = cfg.optimizer;
  const auto params = model.params();
  const std::size_t n = cfg.points;
  const std::size_t total = prepared.size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    opt.learning_rate = cfg.learning_rate_at(epoch);

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(hash_seed({cfg.seed, kShuffleStream, epoch}));
    for (std::size_t i = total; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0.0;
    std::size_t correct = 0, scored = 0;
    for (std::size_t b = 0; b < total; b += cfg.batch_size) {
      const std::size_t bs = std::min(cfg.batch_size, total - b);
      std::vector<PointCloud> batch;
      batch.reserve(bs);
      for (std::size_t j = 0; j < bs; ++j) {
        const std::size_t idx = order[b + j];
        if (cfg.augment) {
          AugmentConfig aug = cfg.augmentation;
          aug.seed = hash_seed({cfg.seed, epoch, idx});
          batch.push_back(augment(prepared[idx], aug));
        } else {
          batch.push_back(prepared[idx]);
        }
      }
      std::vector<const PointCloud*> ptrs;
      for (const auto& c : batch) ptrs.push_back(&c);
      const Tensor<float> x = stack_features(ptrs);

      std::vector<int> labels;
      if (cfg.task == Task::kClassify) {
        for (const auto& c : batch) labels.push_back(*c.class_label);
      } else {
        for (const auto& c : batch) labels.insert(labels.end(), c.part_labels.begin(), c.part_labels.end());
      }

      ForwardTrace<float> trace;
      const BatchLayout layout{bs, n};
      const Tensor<float> logits = model.forward(x, layout, &trace);
      const auto loss = softmax_cross_entropy(logits, labels);
      zero_grads(params);
      model.backward(trace, loss.grad);
      optimizer_step(params, opt);

      loss_sum += static_cast<double>(loss.loss) * static_cast<double>(bs);
      const auto pred = predict(logits);
      for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
      scored += pred.size();
    }

    EpochLog entry;
    entry.epoch = epoch + 1;
    entry.loss = loss_sum / static_cast<double>(total);
    entry.train_acc = static_cast<double>(correct) / static_cast<double>(scored);
    entry.val_acc = std::numeric_limits<double>::quiet_NaN();
    if (val_set && !val_set->clouds.empty()) {
      EvalOptions eo;
      eo.points = n;
      eo.threads = cfg.threads;
      const MetricsReport r = cfg.task == Task::kClassify ? evaluate_classification(model, *val_set, eo)
                                                          : evaluate_segmentation(model, *val_set, eo);
      entry.val_acc = cfg.task == Task::kClassify ? r.instance_accuracy : r.mean_miou;
    }
    entry.seconds = elapsed(start);
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return result;
}

std::string format_train_log(std::span<const EpochLog> log) {
  std::string out = "epoch,loss,train_acc,val_acc,seconds\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.3f\n", e.epoch, e.loss, e.train_acc, e.val_acc, e.seconds);
    out += buf;
  }
  return out;
}

}  // namespace penet
