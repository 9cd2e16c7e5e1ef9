#include "penet/aggregate.hpp"

#include <algorithm>
#include <numeric>

namespace penet {
namespace {

template <typename T>
void check_embeddings(const Tensor<T>& E, const char* what) {
  if (E.empty()) throw EmptyCloudError(std::string(what) + ": cloud has no points");
  if (E.rank() != 2) throw DimensionError(std::string(what) + ": expected [N x k], got " + to_string(E.shape()));
}

template <typename T>
void normalize_row(std::span<const T> v, std::span<T> out, std::size_t& amin, std::size_t& amax) {
  amin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  amax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const T lo = v[amin];
  const T range = v[amax] - lo;
  if (!(range > T{0})) {
    std::fill(out.begin(), out.end(), T{0});
    return;
  }
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - lo) / range;
}

}  // namespace

template <typename T>
Tensor<T> sum_pool(const Tensor<T>& E) {
  check_embeddings(E, "sum_pool");
  const std::size_t n = E.dim(0), k = E.dim(1);
  Tensor<T> out({k});
  for (std::size_t i = 0; i < n; ++i) {
    auto r = E.row(i);
    for (std::size_t j = 0; j < k; ++j) out[j] += r[j];
  }
  return out;
}

template <typename T>
Tensor<T> canonical_sum_pool(const Tensor<T>& E) {
  check_embeddings(E, "canonical_sum_pool");
  const std::size_t n = E.dim(0), k = E.dim(1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = E.row(a);
    auto rb = E.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  Tensor<T> out({k});
  for (std::size_t i : order) {
    auto r = E.row(i);
    for (std::size_t j = 0; j < k; ++j) out[j] += r[j];
  }
  return out;
}

template <typename T>
Tensor<T> mean_pool(const Tensor<T>& E) {
  Tensor<T> out = sum_pool(E);
  const T inv = T{1} / static_cast<T>(E.dim(0));
  for (T& v : out.data()) v *= inv;
  return out;
}

template <typename T>
Tensor<T> min_max_normalize(const Tensor<T>& v) {
  if (v.empty()) throw DimensionError("min_max_normalize: empty vector");
  Tensor<T> out(v.shape());
  std::size_t amin = 0, amax = 0;
  normalize_row(v.data(), out.data(), amin, amax);
  return out;
}

template <typename T>
GlobalFeature<T> global_feature(const Tensor<T>& E) {
  check_embeddings(E, "global_feature");
  return {min_max_normalize(mean_pool(E)), E.dim(0)};
}

template <typename T>
Tensor<T> mean_pool_batch(const Tensor<T>& flat, const BatchLayout& layout) {
  check_embeddings(flat, "mean_pool_batch");
  layout.validate(flat.dim(0));
  const std::size_t w = flat.dim(1);
  Tensor<T> pooled({layout.bs, w});
  const T inv = T{1} / static_cast<T>(layout.points);
  for (std::size_t c = 0; c < layout.bs; ++c) {
    auto acc = pooled.row(c);
    for (std::size_t i = 0; i < layout.points; ++i) {
      auto r = flat.row(c * layout.points + i);
      for (std::size_t j = 0; j < w; ++j) acc[j] += r[j];
    }
    for (T& v : acc) v *= inv;
  }
  return pooled;
}

template <typename T>
Tensor<T> mean_pool_batch_backward(const Tensor<T>& d_pooled, const BatchLayout& layout) {
  if (d_pooled.rank() != 2 || d_pooled.dim(0) != layout.bs) {
    throw DimensionError("mean_pool_batch_backward: expected [" + std::to_string(layout.bs) + " x w], got " +
                         to_string(d_pooled.shape()));
  }
  const std::size_t w = d_pooled.dim(1);
  Tensor<T> d_flat({layout.rows(), w});
  const T inv = T{1} / static_cast<T>(layout.points);
  for (std::size_t c = 0; c < layout.bs; ++c) {
    auto src = d_pooled.row(c);
    for (std::size_t i = 0; i < layout.points; ++i) {
      auto dst = d_flat.row(c * layout.points + i);
      for (std::size_t j = 0; j < w; ++j) dst[j] = src[j] * inv;
    }
  }
  return d_flat;
}

template <typename T>
Tensor<T> normalize_forward(const Tensor<T>& pooled, AggregateTrace<T>* trace) {
  if (pooled.rank() != 2) throw DimensionError("normalize: expected [bs x k], got " + to_string(pooled.shape()));
  const std::size_t bs = pooled.dim(0);
  Tensor<T> normalized(pooled.shape());
  std::vector<std::size_t> amin(bs), amax(bs);
  for (std::size_t c = 0; c < bs; ++c) normalize_row<T>(pooled.row(c), normalized.row(c), amin[c], amax[c]);
  if (trace) {
    trace->pooled = pooled;
    trace->normalized = normalized;
    trace->argmin = std::move(amin);
    trace->argmax = std::move(amax);
    trace->valid = true;
  }
  return normalized;
}

template <typename T>
Tensor<T> normalize_backward(const AggregateTrace<T>& trace, const Tensor<T>& d_global) {
  if (!trace.valid) throw StateError("aggregate backward called without a forward trace");
  expect_shape(d_global, trace.normalized.shape(), "aggregate backward upstream");
  const std::size_t bs = d_global.dim(0), k = d_global.dim(1);
  Tensor<T> d_pooled({bs, k});
  for (std::size_t c = 0; c < bs; ++c) {
    auto v = trace.pooled.row(c);
    auto y = trace.normalized.row(c);
    auto dy = d_global.row(c);
    auto dv = d_pooled.row(c);
    const std::size_t lo = trace.argmin[c], hi = trace.argmax[c];
    const T range = v[hi] - v[lo];
    if (!(range > T{0})) continue;
    // y_j = (v_j − v_lo)/R:  ∂/∂v_j = 1/R,  ∂/∂v_lo = (y_j − 1)/R,  ∂/∂v_hi = −y_j/R.
    T to_lo{0}, to_hi{0};
    for (std::size_t j = 0; j < k; ++j) {
      dv[j] = dy[j] / range;
      to_lo += dy[j] * (y[j] - T{1});
      to_hi -= dy[j] * y[j];
    }
    dv[lo] += to_lo / range;
    dv[hi] += to_hi / range;
  }
  return d_pooled;
}

template <typename T>
Tensor<T> aggregate_forward(const Tensor<T>& flat, const BatchLayout& layout, AggregateTrace<T>* trace) {
  check_embeddings(flat, "aggregate");
  Tensor<T> normalized = normalize_forward(mean_pool_batch(flat, layout), trace);
  if (trace) trace->layout = layout;
  return normalized;
}

template <typename T>
Tensor<T> aggregate_backward(const AggregateTrace<T>& trace, const Tensor<T>& d_global) {
  return mean_pool_batch_backward(normalize_backward(trace, d_global), trace.layout);
}

template <typename T>
bool has_extremum_tie(std::span<const T> v, T gap) {
  if (v.size() < 2) return false;
  std::vector<T> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s[1] - s[0] <= gap || s[s.size() - 1] - s[s.size() - 2] <= gap;
}

#define PENET_INSTANTIATE(T)                                                                       \
  template Tensor<T> sum_pool(const Tensor<T>&);                                                  \
  template Tensor<T> canonical_sum_pool(const Tensor<T>&);                                        \
  template Tensor<T> mean_pool(const Tensor<T>&);                                                 \
  template Tensor<T> min_max_normalize(const Tensor<T>&);                                         \
  template GlobalFeature<T> global_feature(const Tensor<T>&);                                     \
  template Tensor<T> mean_pool_batch(const Tensor<T>&, const BatchLayout&);                      \
  template Tensor<T> mean_pool_batch_backward(const Tensor<T>&, const BatchLayout&);             \
  template Tensor<T> normalize_forward(const Tensor<T>&, AggregateTrace<T>*);                    \
  template Tensor<T> normalize_backward(const AggregateTrace<T>&, const Tensor<T>&);             \
  template Tensor<T> aggregate_forward(const Tensor<T>&, const BatchLayout&, AggregateTrace<T>*); \
  template Tensor<T> aggregate_backward(const AggregateTrace<T>&, const Tensor<T>&);              \
  template bool has_extremum_tie(std::span<const T>, T);

PENET_INSTANTIATE(float)
PENET_INSTANTIATE(double)
#undef PENET_INSTANTIATE

}  // namespace penet
