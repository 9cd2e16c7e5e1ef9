#pragma once

#include <cstdint>
#include <vector>

#include "penet/layers.hpp"

namespace penet {

enum class OptimizerKind { kSgd, kAdam };

template <typename T>
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  // Adam only; lazily sized to the parameter set on the first step.
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
};

/// SGD: p <- p - lr*g.  Adam: bias-corrected first/second moment update.
/// Parameter order must stay fixed across calls.
template <typename T>
void optimizer_step(const ParamRefs<T>& params, OptimizerState<T>& state);

template <typename T>
void zero_grads(const ParamRefs<T>& params) {
  for (Param<T>* p : params) p->zero_grad();
}

}  // namespace penet
