#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "penet/layers.hpp"

namespace penet {

/// Shape of a flattened batch: bs clouds of N points each, m = bs·N rows.
struct BatchLayout {
  std::size_t bs = 1;
  std::size_t points = 1;

  std::size_t rows() const noexcept { return bs * points; }
  /// Throws LayoutError unless `m` rows match this layout.
  void validate(std::size_t m) const;
};

/// Layer widths din → ... → k for an encoder of the given depth (1-5).
/// Depth 3 is the canonical din→64→128→k mapping.
std::vector<std::size_t> encoder_widths(std::size_t din, std::size_t k, int depth);

template <typename T>
struct EncoderTrace {
  /// activations[l] is the input of layer l: the raw points for l = 0, the
  /// ReLU output of layer l-1 otherwise.
  std::vector<Tensor<T>> activations;
  /// Set by pooled_forward: per-cloud mean of the last layer's input [bs×w].
  Tensor<T> pooled_input;
  BatchLayout layout;
  bool valid = false;
};

/// Per-point MLP embedding each row independently into R^k. ReLU follows
/// every layer except the last.
template <typename T>
class Encoder {
 public:
  static constexpr std::size_t kLocalFeatureWidth = 128;

  Encoder() = default;
  Encoder(std::size_t din, std::size_t k, int depth);

  std::size_t din() const { return layers.front().in_features(); }
  std::size_t k() const { return layers.back().out_features(); }
  int depth() const { return static_cast<int>(layers.size()); }

  /// Embeds a single point of din features.
  Tensor<T> embed_point(std::span<const T> p) const;

  /// One forward over all m = bs·N rows; row i equals embed_point(points[i]).
  Tensor<T> embed_batch(const Tensor<T>& points, const BatchLayout& layout) const;

  Tensor<T> forward(const Tensor<T>& points, EncoderTrace<T>* trace) const;

  /// Mean-pooled embeddings [bs×k]. The last layer is affine, so it is
  /// applied once per cloud to the pooled input of that layer instead of to
  /// every point; equal to mean_pool_batch(embed_batch(points)) up to
  /// rounding.
  Tensor<T> pooled_forward(const Tensor<T>& points, const BatchLayout& layout, EncoderTrace<T>* trace) const;

  /// Backward of pooled_forward from d(pooled) [bs×k].
  Tensor<T> pooled_backward(const EncoderTrace<T>& trace, const Tensor<T>& d_pooled, const Tensor<T>* d_local,
                            bool need_input_grad = false);

  /// Index into EncoderTrace::activations of the first 128-wide hidden
  /// activation, or -1 when the architecture has none (depth 1).
  int local_feature_index() const;

  /// Backpropagates `d_out` [m×k] (and optionally a gradient w.r.t. the
  /// local feature activation). Returns d(points) when `need_input_grad`.
  Tensor<T> backward(const EncoderTrace<T>& trace, const Tensor<T>& d_out, const Tensor<T>* d_local,
                     bool need_input_grad = false);

  void init(Rng& rng);
  void collect(ParamRefs<T>& out);

  std::vector<Linear<T>> layers;

 private:
  /// Runs every layer but the last; returns that layer's input.
  Tensor<T> hidden_forward(const Tensor<T>& points, EncoderTrace<T>* trace) const;
  /// Continues backward from d(activations[last]).
  Tensor<T> backward_from_last_input(const EncoderTrace<T>& trace, Tensor<T> d, const Tensor<T>* d_local,
                                     bool need_input_grad);
};

/// Views flat encoder output [m×k] as [bs×N×k]; row order is cloud-major.
template <typename T>
Tensor<T> split_rows(const Tensor<T>& flat, const BatchLayout& layout);

}  // namespace penet
