#include "penet/layers.hpp"

#include <cmath>

namespace penet {

template <typename T>
void xavier_uniform(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : t.data()) v = static_cast<T>(rng.uniform(-limit, limit));
}

template void xavier_uniform(Tensor<float>&, std::size_t, std::size_t, Rng&);
template void xavier_uniform(Tensor<double>&, std::size_t, std::size_t, Rng&);

}  // namespace penet
