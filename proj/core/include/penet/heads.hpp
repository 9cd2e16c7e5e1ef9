#pragma once

#include <cstddef>
#include <vector>

#include "penet/encoder.hpp"
#include "penet/kernels.hpp"
#include "penet/layers.hpp"

namespace penet {

/// Side length g of the square feature grid for a k-dim feature; throws
/// DimensionError when k is not a perfect square.
std::size_t grid_side(std::size_t k);

/// [k] → [1×g×g] or [bs×k] → [bs×1×g×g], row-major: grid[r][c] = feature[r·g + c].
template <typename T>
Tensor<T> reshape_grid(const Tensor<T>& features);

template <typename T>
struct ClassHeadTrace {
  Tensor<T> grid, act1, act2, flat, hidden;
  MaxPoolResult<T> pool1, pool2;
  bool valid = false;
};

/// Two conv(3×3, pad 1) + ReLU + 2×2 maxpool blocks (1→16→32 channels),
/// then affine → 256 → ReLU → affine → num_classes.
template <typename T>
class ClassHead {
 public:
  static constexpr std::size_t kChannels1 = 16;
  static constexpr std::size_t kChannels2 = 32;
  static constexpr std::size_t kHidden = 256;

  ClassHead() = default;
  ClassHead(std::size_t grid, std::size_t num_classes);

  std::size_t grid() const { return grid_; }
  std::size_t num_classes() const { return fc2.out_features(); }

  /// grids [bs×1×g×g] → logits [bs×num_classes].
  Tensor<T> forward(const Tensor<T>& grids, ClassHeadTrace<T>* trace) const;
  /// Returns the gradient w.r.t. the input grids.
  Tensor<T> backward(const ClassHeadTrace<T>& trace, const Tensor<T>& d_logits);

  void init(Rng& rng);
  void collect(ParamRefs<T>& out);

  Conv2d<T> conv1, conv2;
  Linear<T> fc1, fc2;

 private:
  std::size_t grid_ = 0;
};

template <typename T>
struct SegHeadTrace {
  BatchLayout layout;
  Tensor<T> fused, hidden1, hidden2;
  bool valid = false;
};

template <typename T>
struct SegHeadGrads {
  Tensor<T> d_local;   // [m×128]
  Tensor<T> d_global;  // [bs×k]
};

/// Per-point decoder over concat(global feature, local feature):
/// (k+128) → 256 → ReLU → 128 → ReLU → num_parts.
template <typename T>
class SegHead {
 public:
  static constexpr std::size_t kHidden1 = 256;
  static constexpr std::size_t kHidden2 = 128;

  SegHead() = default;
  SegHead(std::size_t k, std::size_t local_width, std::size_t num_parts);

  std::size_t num_parts() const { return out.out_features(); }

  /// local [m×128], globals [bs×k] → per-point logits [m×num_parts].
  Tensor<T> forward(const Tensor<T>& local, const Tensor<T>& globals, const BatchLayout& layout,
                    SegHeadTrace<T>* trace) const;
  SegHeadGrads<T> backward(const SegHeadTrace<T>& trace, const Tensor<T>& d_logits);

  void init(Rng& rng);
  void collect(ParamRefs<T>& out_params);

  Linear<T> fuse, hidden, out;

 private:
  std::size_t k_ = 0;
  std::size_t local_width_ = 0;
};

/// Row-wise argmax of logits; ties go to the lowest index.
template <typename T>
std::vector<int> predict(const Tensor<T>& logits) {
  return argmax_rows(logits);
}

}  // namespace penet
