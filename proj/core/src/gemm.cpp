#include "gemm.hpp"

#include <algorithm>
#include <vector>

namespace penet::gemm {
namespace {

constexpr std::size_t kRows = 4;
constexpr std::size_t kCols = 64;

// Accumulators live in a local tile so the compiler keeps them in vector
// registers across the whole k loop.
template <typename T, std::size_t R>
void tile(std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b, T* c, std::size_t j0,
          std::size_t width) {
  T acc[R][kCols];
  for (std::size_t r = 0; r < R; ++r) std::copy_n(c + r * n + j0, width, acc[r]);
  if (width == kCols) {
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n + j0;
      for (std::size_t r = 0; r < R; ++r) {
        const T av = a[r * lda + p];
        for (std::size_t j = 0; j < kCols; ++j) acc[r][j] += av * brow[j];
      }
    }
  } else {
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n + j0;
      for (std::size_t r = 0; r < R; ++r) {
        const T av = a[r * lda + p];
        for (std::size_t j = 0; j < width; ++j) acc[r][j] += av * brow[j];
      }
    }
  }
  for (std::size_t r = 0; r < R; ++r) std::copy_n(acc[r], width, c + r * n + j0);
}

template <typename T, std::size_t R>
void row_block(std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  for (std::size_t j0 = 0; j0 < n; j0 += kCols) tile<T, R>(n, k, a, k, b, c, j0, std::min(kCols, n - j0));
}

}  // namespace

template <typename T>
void nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, T{0});
  std::size_t i = 0;
  for (; i + kRows <= m; i += kRows) row_block<T, kRows>(n, k, a + i * k, b, c + i * n);
  for (; i < m; ++i) row_block<T, 1>(n, k, a + i * k, b, c + i * n);
}

template <typename T>
void tn_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    const T* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      T* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void nt(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  std::vector<T> bt(n * k);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  }
  nn(m, k, n, a, bt.data(), c, false);
}

template void nn(std::size_t, std::size_t, std::size_t, const float*, const float*, float*, bool);
template void nn(std::size_t, std::size_t, std::size_t, const double*, const double*, double*, bool);
template void tn_accumulate(std::size_t, std::size_t, std::size_t, const float*, const float*, float*);
template void tn_accumulate(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);
template void nt(std::size_t, std::size_t, std::size_t, const float*, const float*, float*);
template void nt(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);

}  // namespace penet::gemm
