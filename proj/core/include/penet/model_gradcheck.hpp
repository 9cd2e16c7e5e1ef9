#pragma once

#include <cstdint>
#include <functional>

#include "penet/gradcheck.hpp"
#include "penet/model.hpp"
#include "penet/optimizer.hpp"

namespace penet {

struct ModelGradCheckOptions {
  std::size_t clouds = 2;
  std::size_t points = 4;
  std::uint64_t seed = 7;
  // One ulp of an O(1) loss moves a step-1e-5 central difference by ~1e-11,
  // so gradients below 1e-5 are compared on an absolute 1e-10 scale.
  GradCheckOptions check{1e-5, 1e-5, 12, 1e-5, 0};
  /// Also probe d(loss)/d(input points).
  bool check_inputs = true;
  /// Inputs whose pooled feature has its two smallest or two largest entries
  /// within this fraction of the range are redrawn.
  double tie_fraction = 1e-4;
  /// Called after the analytic backward pass; lets tests corrupt gradients.
  std::function<void(ParamRefs<double>&)> after_backward;
};

/// Gradient check of the whole pipeline (encoder → global feature → head →
/// softmax cross-entropy) in 64-bit precision on seeded random weights and
/// inputs.
GradCheckReport check_model_gradients(const ModelConfig& config, const ModelGradCheckOptions& options = {});

}  // namespace penet
