#include "penet/model.hpp"

namespace penet {

std::string_view to_string(Task task) {
  return task == Task::kClassify ? "classify" : "segment";
}

Task parse_task(std::string_view text) {
  if (text == "classify") return Task::kClassify;
  if (text == "segment") return Task::kSegment;
  throw ConfigError("unknown task '" + std::string(text) + "' (expected classify or segment)");
}

std::size_t ModelConfig::grid() const {
  return task == Task::kClassify ? grid_side(k) : 0;
}

void ModelConfig::validate() const {
  if (din != 3 && din != 6) throw ConfigError("din must be 3 or 6, got " + std::to_string(din));
  if (k == 0) throw ConfigError("k must be positive");
  encoder_widths(din, k, encoder_depth);
  if (task == Task::kClassify) {
    if (num_classes == 0) throw ConfigError("classification model needs num_classes > 0");
    if (grid_side(k) < 4) throw ConfigError("classification needs k >= 16");
  } else {
    if (num_parts == 0) throw ConfigError("segmentation model needs num_parts > 0");
    if (encoder_depth < 2) throw ConfigError("segmentation needs an encoder with a 128-wide hidden layer (depth >= 2)");
  }
  if (!class_names.empty() && task == Task::kClassify && class_names.size() != num_classes) {
    throw ConfigError("class_names has " + std::to_string(class_names.size()) + " entries for " +
                      std::to_string(num_classes) + " classes");
  }
}

template <typename T>
PeNet<T>::PeNet(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  encoder = Encoder<T>(config_.din, config_.k, config_.encoder_depth);
  if (config_.task == Task::kClassify) {
    class_head.emplace(config_.grid(), config_.num_classes);
  } else {
    seg_head.emplace(config_.k, Encoder<T>::kLocalFeatureWidth, config_.num_parts);
  }
}

template <typename T>
void PeNet<T>::init(std::uint64_t seed) {
  Rng root(seed);
  Rng enc = root.split(1);
  encoder.init(enc);
  Rng head = root.split(2);
  if (class_head) class_head->init(head);
  if (seg_head) seg_head->init(head);
}

template <typename T>
Tensor<T> PeNet<T>::forward(const Tensor<T>& points, const BatchLayout& layout, ForwardTrace<T>* trace) const {
  if (points.rank() != 2) throw DimensionError("model input must be [m x din], got " + to_string(points.shape()));
  layout.validate(points.dim(0));
  EncoderTrace<T> local_enc;
  EncoderTrace<T>* enc_trace = trace ? &trace->encoder : (seg_head ? &local_enc : nullptr);
  Tensor<T> pooled = encoder.pooled_forward(points, layout, enc_trace);
  Tensor<T> globals = normalize_forward(pooled, trace ? &trace->aggregate : nullptr);
  if (trace) trace->aggregate.layout = layout;
  Tensor<T> logits;
  if (class_head) {
    logits = class_head->forward(reshape_grid(globals), trace ? &trace->cls : nullptr);
  } else {
    const auto& local = enc_trace->activations[static_cast<std::size_t>(encoder.local_feature_index())];
    logits = seg_head->forward(local, globals, layout, trace ? &trace->seg : nullptr);
  }
  if (trace) {
    trace->layout = layout;
    trace->valid = true;
  }
  return logits;
}

template <typename T>
Tensor<T> PeNet<T>::global_features(const Tensor<T>& points, const BatchLayout& layout) const {
  return normalize_forward<T>(encoder.pooled_forward(points, layout, nullptr), nullptr);
}

template <typename T>
Tensor<T> PeNet<T>::backward(const ForwardTrace<T>& trace, const Tensor<T>& d_logits, bool need_input_grad) {
  if (!trace.valid) throw StateError("model backward called before forward");
  if (class_head) {
    Tensor<T> d_grid = class_head->backward(trace.cls, d_logits);
    d_grid.reshape(trace.aggregate.normalized.shape());
    return encoder.pooled_backward(trace.encoder, normalize_backward(trace.aggregate, d_grid), nullptr,
                                   need_input_grad);
  }
  SegHeadGrads<T> g = seg_head->backward(trace.seg, d_logits);
  return encoder.pooled_backward(trace.encoder, normalize_backward(trace.aggregate, g.d_global), &g.d_local,
                                 need_input_grad);
}

template <typename T>
ParamRefs<T> PeNet<T>::params() {
  ParamRefs<T> out;
  encoder.collect(out);
  if (class_head) class_head->collect(out);
  if (seg_head) seg_head->collect(out);
  return out;
}

template <typename T>
std::vector<const Param<T>*> PeNet<T>::params() const {
  auto refs = const_cast<PeNet*>(this)->params();
  return {refs.begin(), refs.end()};
}

template class PeNet<float>;
template class PeNet<double>;

}  // namespace penet
