#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penet/aggregate.hpp"
#include "penet/encoder.hpp"
#include "penet/heads.hpp"

namespace penet {

enum class Task { kClassify, kSegment };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

/// Architecture metadata; everything needed to rebuild a model from a
/// checkpoint.
struct ModelConfig {
  Task task = Task::kClassify;
  std::size_t din = 3;
  std::size_t k = 1024;
  int encoder_depth = 3;
  std::size_t num_classes = 0;
  std::size_t num_parts = 0;
  std::vector<std::string> class_names;
  /// Points per cloud used during training; default for evaluation.
  std::size_t train_points = 1024;

  /// Grid side for classification (0 for segmentation).
  std::size_t grid() const;
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct ForwardTrace {
  BatchLayout layout;
  EncoderTrace<T> encoder;
  AggregateTrace<T> aggregate;
  ClassHeadTrace<T> cls;
  SegHeadTrace<T> seg;
  bool valid = false;
};

/// Point encoder + global feature + task head.
template <typename T>
class PeNet {
 public:
  explicit PeNet(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  /// Xavier-uniform weights and zero biases from a seeded stream.
  void init(std::uint64_t seed);

  /// points [bs·N × din] → logits: [bs×num_classes] (classify) or
  /// [bs·N × num_parts] (segment).
  Tensor<T> forward(const Tensor<T>& points, const BatchLayout& layout, ForwardTrace<T>* trace = nullptr) const;

  /// Normalized global features [bs×k].
  Tensor<T> global_features(const Tensor<T>& points, const BatchLayout& layout) const;

  /// Accumulates parameter gradients. Returns d(points) when requested.
  Tensor<T> backward(const ForwardTrace<T>& trace, const Tensor<T>& d_logits, bool need_input_grad = false);

  ParamRefs<T> params();
  std::vector<const Param<T>*> params() const;

  template <typename U>
  PeNet<U> cast() const {
    PeNet<U> out(config_);
    auto dst = out.params();
    auto src = params();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value.template cast<U>();
    return out;
  }

  Encoder<T> encoder;
  std::optional<ClassHead<T>> class_head;
  std::optional<SegHead<T>> seg_head;

 private:
  ModelConfig config_;
};

}  // namespace penet
