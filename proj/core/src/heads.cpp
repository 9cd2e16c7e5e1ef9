#include "penet/heads.hpp"

#include <cmath>
#include <string>

namespace penet {

std::size_t grid_side(std::size_t k) {
  auto g = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(k))));
  while (g * g > k) --g;
  while ((g + 1) * (g + 1) <= k) ++g;
  if (g * g != k) throw DimensionError("feature length " + std::to_string(k) + " is not a perfect square");
  return g;
}

template <typename T>
Tensor<T> reshape_grid(const Tensor<T>& features) {
  if (features.rank() == 1) {
    const std::size_t g = grid_side(features.dim(0));
    return features.reshaped({1, g, g});
  }
  if (features.rank() == 2) {
    const std::size_t g = grid_side(features.dim(1));
    return features.reshaped({features.dim(0), 1, g, g});
  }
  throw DimensionError("reshape_grid: expected [k] or [bs x k], got " + to_string(features.shape()));
}

namespace {

std::size_t pooled_side(std::size_t g) {
  if (g < 4) throw DimensionError("class head needs a grid of at least 4x4, got " + std::to_string(g));
  return (g / 2) / 2;
}

}  // namespace

template <typename T>
ClassHead<T>::ClassHead(std::size_t grid, std::size_t num_classes)
    : conv1("cls.conv1", 1, kChannels1, 3, 1, 1),
      conv2("cls.conv2", kChannels1, kChannels2, 3, 1, 1),
      fc1("cls.fc1", kChannels2 * pooled_side(grid) * pooled_side(grid), kHidden),
      fc2("cls.fc2", kHidden, num_classes),
      grid_(grid) {
  if (num_classes == 0) throw ConfigError("class head needs at least one class");
}

template <typename T>
Tensor<T> ClassHead<T>::forward(const Tensor<T>& grids, ClassHeadTrace<T>* trace) const {
  if (grids.rank() != 4 || grids.dim(1) != 1 || grids.dim(2) != grid_ || grids.dim(3) != grid_) {
    throw DimensionError("class head expects [bs x 1 x " + std::to_string(grid_) + " x " + std::to_string(grid_) +
                         "], got " + to_string(grids.shape()));
  }
  const std::size_t bs = grids.dim(0);
  Tensor<T> a1 = relu_forward(conv1.forward(grids));
  auto p1 = maxpool2d_forward(a1, 2, 2);
  Tensor<T> a2 = relu_forward(conv2.forward(p1.out));
  auto p2 = maxpool2d_forward(a2, 2, 2);
  Tensor<T> flat = p2.out.reshaped({bs, p2.out.size() / bs});
  Tensor<T> hidden = relu_forward(fc1.forward(flat));
  Tensor<T> logits = fc2.forward(hidden);
  if (trace) {
    trace->grid = grids;
    trace->act1 = std::move(a1);
    trace->pool1 = std::move(p1);
    trace->act2 = std::move(a2);
    trace->pool2 = std::move(p2);
    trace->flat = std::move(flat);
    trace->hidden = std::move(hidden);
    trace->valid = true;
  }
  return logits;
}

template <typename T>
Tensor<T> ClassHead<T>::backward(const ClassHeadTrace<T>& trace, const Tensor<T>& d_logits) {
  if (!trace.valid) throw StateError("class head backward called without a forward trace");
  Tensor<T> d = fc2.backward(trace.hidden, d_logits);
  d = relu_backward(trace.hidden, d);
  d = fc1.backward(trace.flat, d);
  d.reshape(trace.pool2.out.shape());
  d = maxpool2d_backward(trace.pool2, d);
  d = relu_backward(trace.act2, d);
  d = conv2.backward(trace.pool1.out, d);
  d = maxpool2d_backward(trace.pool1, d);
  d = relu_backward(trace.act1, d);
  return conv1.backward(trace.grid, d);
}

template <typename T>
void ClassHead<T>::init(Rng& rng) {
  conv1.init(rng);
  conv2.init(rng);
  fc1.init(rng);
  fc2.init(rng);
}

template <typename T>
void ClassHead<T>::collect(ParamRefs<T>& out) {
  conv1.collect(out);
  conv2.collect(out);
  fc1.collect(out);
  fc2.collect(out);
}

template <typename T>
SegHead<T>::SegHead(std::size_t k, std::size_t local_width, std::size_t num_parts)
    : fuse("seg.fuse", k + local_width, kHidden1),
      hidden("seg.hidden", kHidden1, kHidden2),
      out("seg.out", kHidden2, num_parts),
      k_(k),
      local_width_(local_width) {
  if (num_parts == 0) throw ConfigError("segmentation head needs at least one part");
}

template <typename T>
Tensor<T> SegHead<T>::forward(const Tensor<T>& local, const Tensor<T>& globals, const BatchLayout& layout,
                              SegHeadTrace<T>* trace) const {
  if (local.empty()) throw EmptyCloudError("segment: cloud has no points");
  if (local.rank() != 2 || local.dim(1) != local_width_) {
    throw DimensionError("segment: expected local features [m x " + std::to_string(local_width_) + "], got " +
                         to_string(local.shape()));
  }
  layout.validate(local.dim(0));
  expect_shape(globals, Shape{layout.bs, k_}, "segment global features");

  const std::size_t m = layout.rows(), width = k_ + local_width_;
  Tensor<T> fused({m, width});
  for (std::size_t i = 0; i < m; ++i) {
    auto dst = fused.row(i);
    auto g = globals.row(i / layout.points);
    auto l = local.row(i);
    std::copy(g.begin(), g.end(), dst.begin());
    std::copy(l.begin(), l.end(), dst.begin() + static_cast<std::ptrdiff_t>(k_));
  }
  Tensor<T> h1 = relu_forward(fuse.forward(fused));
  Tensor<T> h2 = relu_forward(hidden.forward(h1));
  Tensor<T> logits = out.forward(h2);
  if (trace) *trace = {layout, std::move(fused), std::move(h1), std::move(h2), true};
  return logits;
}

template <typename T>
SegHeadGrads<T> SegHead<T>::backward(const SegHeadTrace<T>& trace, const Tensor<T>& d_logits) {
  if (!trace.valid) throw StateError("segmentation head backward called without a forward trace");
  Tensor<T> d = out.backward(trace.hidden2, d_logits);
  d = relu_backward(trace.hidden2, d);
  d = hidden.backward(trace.hidden1, d);
  d = relu_backward(trace.hidden1, d);
  d = fuse.backward(trace.fused, d);

  const auto& layout = trace.layout;
  SegHeadGrads<T> g{Tensor<T>({layout.rows(), local_width_}), Tensor<T>({layout.bs, k_})};
  for (std::size_t i = 0; i < layout.rows(); ++i) {
    auto src = d.row(i);
    auto dg = g.d_global.row(i / layout.points);
    for (std::size_t j = 0; j < k_; ++j) dg[j] += src[j];
    auto dl = g.d_local.row(i);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(k_), src.end(), dl.begin());
  }
  return g;
}

template <typename T>
void SegHead<T>::init(Rng& rng) {
  fuse.init(rng);
  hidden.init(rng);
  out.init(rng);
}

template <typename T>
void SegHead<T>::collect(ParamRefs<T>& out_params) {
  fuse.collect(out_params);
  hidden.collect(out_params);
  out.collect(out_params);
}

template Tensor<float> reshape_grid(const Tensor<float>&);
template Tensor<double> reshape_grid(const Tensor<double>&);
template class ClassHead<float>;
template class ClassHead<double>;
template class SegHead<float>;
template class SegHead<double>;

}  // namespace penet
