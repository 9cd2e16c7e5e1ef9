#include "penet/optimizer.hpp"

#include <cmath>

namespace penet {

template <typename T>
void optimizer_step(const ParamRefs<T>& params, OptimizerState<T>& state) {
  ++state.step_count;
  if (state.kind == OptimizerKind::kSgd) {
    const T lr = static_cast<T>(state.learning_rate);
    for (Param<T>* p : params) {
      auto v = p->value.data();
      auto g = p->grad.data();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
    }
    return;
  }

  if (state.first_moment.size() != params.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    for (Param<T>* p : params) {
      state.first_moment.emplace_back(p->value.shape());
      state.second_moment.emplace_back(p->value.shape());
    }
  }
  const double t = static_cast<double>(state.step_count);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta2, t)));
  const T lr = static_cast<T>(state.learning_rate);
  const T eps = static_cast<T>(state.epsilon);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<T>& p = *params[k];
    expect_shape(state.first_moment[k], p.value.shape(), "adam moment");
    auto v = p.value.data();
    auto g = p.grad.data();
    auto m1 = state.first_moment[k].data();
    auto m2 = state.second_moment[k].data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      m1[i] = b1 * m1[i] + (T{1} - b1) * g[i];
      m2[i] = b2 * m2[i] + (T{1} - b2) * g[i] * g[i];
      const T mhat = m1[i] * c1;
      const T vhat = m2[i] * c2;
      v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template void optimizer_step(const ParamRefs<float>&, OptimizerState<float>&);
template void optimizer_step(const ParamRefs<double>&, OptimizerState<double>&);

}  // namespace penet
