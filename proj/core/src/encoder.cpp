#include "penet/encoder.hpp"

#include <string>

#include "penet/aggregate.hpp"

namespace penet {

void BatchLayout::validate(std::size_t m) const {
  if (bs == 0 || points == 0 || m != bs * points) {
    throw LayoutError("batch layout bs=" + std::to_string(bs) + " N=" + std::to_string(points) +
                      " expects " + std::to_string(bs * points) + " rows, got " + std::to_string(m));
  }
}

std::vector<std::size_t> encoder_widths(std::size_t din, std::size_t k, int depth) {
  switch (depth) {
    case 1: return {din, k};
    case 2: return {din, 128, k};
    case 3: return {din, 64, 128, k};
    case 4: return {din, 64, 128, 256, k};
    case 5: return {din, 64, 128, 256, 512, k};
    default: throw ConfigError("encoder depth must be in [1, 5], got " + std::to_string(depth));
  }
}

template <typename T>
Encoder<T>::Encoder(std::size_t din, std::size_t k, int depth) {
  if (din == 0 || k == 0) throw ConfigError("encoder dimensions must be positive");
  const auto widths = encoder_widths(din, k, depth);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers.emplace_back("encoder." + std::to_string(l), widths[l], widths[l + 1]);
  }
}

template <typename T>
Tensor<T> Encoder<T>::embed_point(std::span<const T> p) const {
  if (p.size() != din()) {
    throw DimensionError("embed_point: expected " + std::to_string(din()) + " features, got " +
                         std::to_string(p.size()));
  }
  Tensor<T> x({1, p.size()}, std::vector<T>(p.begin(), p.end()));
  return forward(x, nullptr).reshaped({k()});
}

template <typename T>
Tensor<T> Encoder<T>::embed_batch(const Tensor<T>& points, const BatchLayout& layout) const {
  if (points.rank() != 2) throw DimensionError("embed_batch: expected [m x din], got " + to_string(points.shape()));
  layout.validate(points.dim(0));
  return forward(points, nullptr);
}

template <typename T>
Tensor<T> Encoder<T>::hidden_forward(const Tensor<T>& points, EncoderTrace<T>* trace) const {
  if (points.rank() != 2 || points.dim(1) != din()) {
    throw DimensionError("encoder: expected [m x " + std::to_string(din()) + "] input, got " +
                         to_string(points.shape()));
  }
  if (trace) {
    trace->activations.clear();
    trace->activations.push_back(points);
    trace->valid = false;
  }
  Tensor<T> h = points;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    h = relu_forward(layers[l].forward(h));
    if (trace) trace->activations.push_back(h);
  }
  return h;
}

template <typename T>
Tensor<T> Encoder<T>::forward(const Tensor<T>& points, EncoderTrace<T>* trace) const {
  Tensor<T> out = layers.back().forward(hidden_forward(points, trace));
  if (trace) {
    trace->pooled_input = Tensor<T>();
    trace->valid = true;
  }
  return out;
}

template <typename T>
Tensor<T> Encoder<T>::pooled_forward(const Tensor<T>& points, const BatchLayout& layout,
                                     EncoderTrace<T>* trace) const {
  if (points.rank() == 2) layout.validate(points.dim(0));
  Tensor<T> pooled = mean_pool_batch(hidden_forward(points, trace), layout);
  Tensor<T> out = layers.back().forward(pooled);
  if (trace) {
    trace->pooled_input = std::move(pooled);
    trace->layout = layout;
    trace->valid = true;
  }
  return out;
}

template <typename T>
int Encoder<T>::local_feature_index() const {
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].in_features() == kLocalFeatureWidth) return static_cast<int>(l);
  }
  return -1;
}

template <typename T>
Tensor<T> Encoder<T>::backward(const EncoderTrace<T>& trace, const Tensor<T>& d_out, const Tensor<T>* d_local,
                               bool need_input_grad) {
  if (!trace.valid || trace.activations.size() != layers.size() || !trace.pooled_input.empty()) {
    throw StateError("encoder backward called without a matching forward trace");
  }
  const bool need_dx = layers.size() > 1 || need_input_grad;
  Tensor<T> d = layers.back().backward(trace.activations.back(), d_out, need_dx);
  return backward_from_last_input(trace, std::move(d), d_local, need_input_grad);
}

template <typename T>
Tensor<T> Encoder<T>::pooled_backward(const EncoderTrace<T>& trace, const Tensor<T>& d_pooled,
                                      const Tensor<T>* d_local, bool need_input_grad) {
  if (!trace.valid || trace.activations.size() != layers.size() || trace.pooled_input.empty()) {
    throw StateError("encoder pooled backward called without a matching pooled forward trace");
  }
  Tensor<T> d = layers.back().backward(trace.pooled_input, d_pooled, true);
  return backward_from_last_input(trace, mean_pool_batch_backward(d, trace.layout), d_local, need_input_grad);
}

template <typename T>
Tensor<T> Encoder<T>::backward_from_last_input(const EncoderTrace<T>& trace, Tensor<T> d, const Tensor<T>* d_local,
                                               bool need_input_grad) {
  const int local = local_feature_index();
  if (d_local && local < 0) throw StateError("encoder has no local feature layer to receive a gradient");
  // d holds the gradient w.r.t. activations[l].
  for (std::size_t l = layers.size() - 1; l > 0; --l) {
    if (d_local && static_cast<int>(l) == local) {
      auto ds = d.data();
      auto ls = d_local->data();
      if (ds.size() != ls.size()) throw DimensionError("encoder backward: local gradient shape mismatch");
      for (std::size_t i = 0; i < ds.size(); ++i) ds[i] += ls[i];
    }
    d = relu_backward(trace.activations[l], d);
    d = layers[l - 1].backward(trace.activations[l - 1], d, l > 1 || need_input_grad);
  }
  return need_input_grad ? d : Tensor<T>();
}

template <typename T>
void Encoder<T>::init(Rng& rng) {
  for (auto& layer : layers) layer.init(rng);
}

template <typename T>
void Encoder<T>::collect(ParamRefs<T>& out) {
  for (auto& layer : layers) layer.collect(out);
}

template <typename T>
Tensor<T> split_rows(const Tensor<T>& flat, const BatchLayout& layout) {
  if (flat.rank() != 2) throw DimensionError("split_rows: expected [m x k], got " + to_string(flat.shape()));
  layout.validate(flat.dim(0));
  return flat.reshaped({layout.bs, layout.points, flat.dim(1)});
}

template class Encoder<float>;
template class Encoder<double>;
template Tensor<float> split_rows(const Tensor<float>&, const BatchLayout&);
template Tensor<double> split_rows(const Tensor<double>&, const BatchLayout&);

}  // namespace penet
