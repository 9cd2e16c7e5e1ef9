#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "penet/kernels.hpp"
#include "penet/rng.hpp"
#include "penet/tensor.hpp"

namespace penet {

/// A trainable tensor with its gradient accumulator. Names double as
/// checkpoint keys and must be unique within a model.
template <typename T>
struct Param {
  Param() = default;
  Param(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(shape) {}

  void zero_grad() { grad.fill(T{0}); }

  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

template <typename T>
using ParamRefs = std::vector<Param<T>*>;

/// Uniform in ±sqrt(6/(fan_in+fan_out)).
template <typename T>
void xavier_uniform(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Affine map x·w + b over rows.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out)
      : weight(name + ".weight", {in, out}), bias(name + ".bias", {out}) {}

  std::size_t in_features() const { return weight.value.dim(0); }
  std::size_t out_features() const { return weight.value.dim(1); }

  Tensor<T> forward(const Tensor<T>& x) const { return linear_forward(x, weight.value, bias.value); }

  /// Accumulates parameter gradients for the forward input `x`; returns dx
  /// unless `need_dx` is false (then an empty tensor).
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy, bool need_dx = true) {
    Tensor<T> dx;
    linear_backward_accumulate(x, weight.value, dy, weight.grad, bias.grad, need_dx ? &dx : nullptr);
    return dx;
  }

  void init(Rng& rng) {
    xavier_uniform(weight.value, in_features(), out_features(), rng);
    bias.value.fill(T{0});
  }

  void collect(ParamRefs<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Param<T> weight;
  Param<T> bias;
};

/// 2D convolution with square kernels.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
         std::size_t stride = 1, std::size_t pad = 0)
      : weight(name + ".weight", {out_ch, in_ch, kernel, kernel}),
        bias(name + ".bias", {out_ch}),
        stride_(stride),
        pad_(pad) {}

  Tensor<T> forward(const Tensor<T>& x) const {
    return conv2d_forward(x, weight.value, bias.value, stride_, pad_);
  }

  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy) {
    auto g = conv2d_backward(x, weight.value, dy, stride_, pad_);
    auto wg = weight.grad.data();
    auto gk = g.dkernels.data();
    for (std::size_t i = 0; i < wg.size(); ++i) wg[i] += gk[i];
    for (std::size_t i = 0; i < bias.grad.size(); ++i) bias.grad[i] += g.db[i];
    return std::move(g.dx);
  }

  void init(Rng& rng) {
    const auto& s = weight.value.shape();
    xavier_uniform(weight.value, s[1] * s[2] * s[3], s[0] * s[2] * s[3], rng);
    bias.value.fill(T{0});
  }

  void collect(ParamRefs<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Param<T> weight;
  Param<T> bias;

 private:
  std::size_t stride_ = 1;
  std::size_t pad_ = 0;
};

}  // namespace penet
