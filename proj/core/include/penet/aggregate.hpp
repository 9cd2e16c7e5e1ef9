#pragma once

#include <cstddef>
#include <vector>

#include "penet/encoder.hpp"
#include "penet/tensor.hpp"

namespace penet {

/// Fixed-length cloud descriptor with every component in [0, 1].
template <typename T>
struct GlobalFeature {
  Tensor<T> values;  // [k]
  std::size_t source_count = 0;
};

/// Column-wise sum of E [N×k], accumulated in row order.
template <typename T>
Tensor<T> sum_pool(const Tensor<T>& E);

/// Sum over rows taken in lexicographically sorted row order, so that any
/// permutation of E yields a bit-identical result.
template <typename T>
Tensor<T> canonical_sum_pool(const Tensor<T>& E);

template <typename T>
Tensor<T> mean_pool(const Tensor<T>& E);

/// (v − min v)/(max v − min v); all zeros when max == min.
template <typename T>
Tensor<T> min_max_normalize(const Tensor<T>& v);

template <typename T>
GlobalFeature<T> global_feature(const Tensor<T>& E);

/// Per-cloud row means of a flat batch: [m×w] → [bs×w], accumulated in row
/// order.
template <typename T>
Tensor<T> mean_pool_batch(const Tensor<T>& flat, const BatchLayout& layout);

/// Gradient of mean_pool_batch: every row of a cloud receives d_pooled/N.
template <typename T>
Tensor<T> mean_pool_batch_backward(const Tensor<T>& d_pooled, const BatchLayout& layout);

/// Intermediates of the batched mean-pool + normalization stage.
template <typename T>
struct AggregateTrace {
  BatchLayout layout;
  Tensor<T> pooled;      // [bs×k]
  Tensor<T> normalized;  // [bs×k]
  std::vector<std::size_t> argmin;
  std::vector<std::size_t> argmax;
  bool valid = false;
};

/// Batched global features: flat embeddings [m×k] → [bs×k].
template <typename T>
Tensor<T> aggregate_forward(const Tensor<T>& flat, const BatchLayout& layout, AggregateTrace<T>* trace);

/// Row-wise min-max normalization of already pooled features [bs×k].
template <typename T>
Tensor<T> normalize_forward(const Tensor<T>& pooled, AggregateTrace<T>* trace);

/// Gradient w.r.t. the pooled features [bs×k].
template <typename T>
Tensor<T> normalize_backward(const AggregateTrace<T>& trace, const Tensor<T>& d_global);

/// Gradient w.r.t. the flat embeddings [m×k]. The min/max subgradient goes to
/// the first (lowest-index) extremum.
template <typename T>
Tensor<T> aggregate_backward(const AggregateTrace<T>& trace, const Tensor<T>& d_global);

/// True when the top two (or bottom two) entries of `v` lie within `gap`;
/// min-max normalization is not differentiable there.
template <typename T>
bool has_extremum_tie(std::span<const T> v, T gap);

}  // namespace penet
