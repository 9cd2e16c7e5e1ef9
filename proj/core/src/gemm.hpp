#pragma once

#include <cstddef>

namespace penet::gemm {

// Row-major products with a fixed accumulation order: every output element
// is c, then c + a0·b0, then (c + a0·b0) + a1·b1, ... regardless of its row,
// the batch size or buffer alignment. Rows of a batched product therefore
// equal the same rows computed one at a time, bit for bit.

/// C[m×n] (+)= A[m×k] · B[k×n].
template <typename T>
void nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c, bool accumulate);

/// C[k×n] += A[m×k]ᵀ · B[m×n]; rows of A and B are summed in order.
template <typename T>
void tn_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c);

/// C[m×k] = A[m×n] · B[k×n]ᵀ.
template <typename T>
void nt(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c);

}  // namespace penet::gemm
