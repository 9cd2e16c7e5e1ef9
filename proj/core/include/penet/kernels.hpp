#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "penet/tensor.hpp"

// Forward and backward kernels for the fixed layer set. All kernels are pure
// functions of their arguments; backward kernels take the forward inputs
// explicitly instead of relying on hidden caches.

namespace penet {

// ---- affine -----------------------------------------------------------------

/// out[i,j] = Σk x[i,k]·w[k,j] + b[j] for x [n×din], w [din×dout], b [dout].
template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T>
struct LinearGrads {
  Tensor<T> dx;
  Tensor<T> dw;
  Tensor<T> db;
};

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy);

/// Accumulating form used by layers: dw += xᵀ·dy, db += Σrows dy, and, when
/// `dx` is non-null, *dx = dy·wᵀ.
template <typename T>
void linear_backward_accumulate(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                                Tensor<T>& dw, Tensor<T>& db, Tensor<T>* dx);

// ---- activation -------------------------------------------------------------

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x);

/// Gradient of ReLU given its forward input (or output; both share the sign
/// pattern). The derivative at exactly zero is taken as 0.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy);

// ---- 2D convolution ---------------------------------------------------------

/// Cross-correlation with zero padding. x [n×c×h×w], kernels [co×c×kh×kw],
/// b [co]. Output spatial size floor((h + 2·pad − kh)/stride) + 1.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& kernels, const Tensor<T>& b,
                         std::size_t stride, std::size_t pad);

template <typename T>
struct Conv2dGrads {
  Tensor<T> dx;
  Tensor<T> dkernels;
  Tensor<T> db;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& kernels, const Tensor<T>& dy,
                               std::size_t stride, std::size_t pad);

// ---- max pooling ------------------------------------------------------------

template <typename T>
struct MaxPoolResult {
  Tensor<T> out;
  /// Flat input offset of each output's maximum (first in row-major window
  /// order on ties).
  std::vector<std::size_t> argmax;
  Shape input_shape;
};

/// Trailing rows/columns that do not fill a window are dropped.
template <typename T>
MaxPoolResult<T> maxpool2d_forward(const Tensor<T>& x, std::size_t window, std::size_t stride);

template <typename T>
Tensor<T> maxpool2d_backward(const MaxPoolResult<T>& fwd, const Tensor<T>& dy);

// ---- loss -------------------------------------------------------------------

template <typename T>
struct LossResult {
  T loss;
  Tensor<T> grad;
};

/// Mean softmax cross-entropy over rows of `logits` [n×C]. The gradient is
/// (softmax − onehot)/n.
template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

/// Row-wise argmax; ties resolve to the lowest index.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& logits);

}  // namespace penet
