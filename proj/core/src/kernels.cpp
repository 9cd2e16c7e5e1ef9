#include "penet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gemm.hpp"

namespace penet {
namespace {

template <typename T>
void check_linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) || w.dim(1) != b.dim(0)) {
    throw DimensionError("linear: x " + to_string(x.shape()) + " incompatible with w " +
                         to_string(w.shape()) + " and b " + to_string(b.shape()));
  }
}

std::size_t conv_out(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

template <typename T>
void check_conv(const Tensor<T>& x, const Tensor<T>& k, std::size_t stride, std::size_t pad) {
  if (x.rank() != 4 || k.rank() != 4 || x.dim(1) != k.dim(1)) {
    throw DimensionError("conv2d: input " + to_string(x.shape()) + " incompatible with kernels " +
                         to_string(k.shape()));
  }
  if (stride == 0) throw DimensionError("conv2d: stride must be >= 1");
  if (k.dim(2) > x.dim(2) + 2 * pad || k.dim(3) > x.dim(3) + 2 * pad) {
    throw DimensionError("conv2d: kernel " + to_string(k.shape()) + " larger than padded input " +
                         to_string(x.shape()));
  }
}

/// Unfolds one image [c×h×w] into columns [c·kh·kw × oh·ow] so a
/// convolution becomes a single matrix product.
struct ConvGeometry {
  std::size_t n, c, h, w, co, kh, kw, oh, ow, stride, pad;

  template <typename T>
  ConvGeometry(const Tensor<T>& x, const Tensor<T>& k, std::size_t stride_, std::size_t pad_)
      : n(x.dim(0)), c(x.dim(1)), h(x.dim(2)), w(x.dim(3)), co(k.dim(0)), kh(k.dim(2)), kw(k.dim(3)),
        oh(conv_out(h, kh, stride_, pad_)), ow(conv_out(w, kw, stride_, pad_)), stride(stride_), pad(pad_) {}

  std::size_t patch() const { return c * kh * kw; }
  std::size_t positions() const { return oh * ow; }

  /// Calls f(column offset, source offset) for every in-bounds tap;
  /// out-of-bounds taps read as zero padding.
  template <typename F>
  void for_each_tap(F&& f) const {
    for (std::size_t ic = 0; ic < c; ++ic) {
      for (std::size_t i = 0; i < kh; ++i) {
        for (std::size_t j = 0; j < kw; ++j) {
          const std::size_t row = (ic * kh + i) * kw + j;
          for (std::size_t y = 0; y < oh; ++y) {
            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y * stride + i) - static_cast<std::ptrdiff_t>(pad);
            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t xo = 0; xo < ow; ++xo) {
              const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xo * stride + j) - static_cast<std::ptrdiff_t>(pad);
              if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
              f(row * positions() + y * ow + xo, (ic * h + static_cast<std::size_t>(sy)) * w + static_cast<std::size_t>(sx));
            }
          }
        }
      }
    }
  }

  template <typename T>
  void im2col(const T* image, T* cols) const {
    std::fill(cols, cols + patch() * positions(), T{0});
    for_each_tap([&](std::size_t col, std::size_t src) { cols[col] = image[src]; });
  }

  template <typename T>
  void col2im(const T* cols, T* image) const {
    for_each_tap([&](std::size_t col, std::size_t src) { image[src] += cols[col]; });
  }
};

}  // namespace

template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  check_linear(x, w, b);
  const std::size_t n = x.dim(0), din = x.dim(1), dout = w.dim(1);
  Tensor<T> out({n, dout});
  for (std::size_t i = 0; i < n; ++i) std::copy_n(b.raw(), dout, out.raw() + i * dout);
  gemm::nn(n, dout, din, x.raw(), w.raw(), out.raw(), true);
  return out;
}

template <typename T>
void linear_backward_accumulate(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                                Tensor<T>& dw, Tensor<T>& db, Tensor<T>* dx) {
  const std::size_t n = x.dim(0), din = x.dim(1), dout = w.dim(1);
  if (dy.rank() != 2 || dy.dim(0) != n || dy.dim(1) != dout) {
    throw DimensionError("linear backward: upstream " + to_string(dy.shape()) + " does not match output [" +
                         std::to_string(n) + "x" + std::to_string(dout) + "]");
  }
  expect_shape(dw, w.shape(), "linear backward dw");
  expect_shape(db, Shape{dout}, "linear backward db");
  gemm::tn_accumulate(n, dout, din, x.raw(), dy.raw(), dw.raw());
  T* dbs = db.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = dy.raw() + i * dout;
    for (std::size_t j = 0; j < dout; ++j) dbs[j] += row[j];
  }
  if (dx) {
    *dx = Tensor<T>({n, din});
    gemm::nt(n, dout, din, dy.raw(), w.raw(), dx->raw());
  }
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy) {
  check_linear(x, w, Tensor<T>({w.dim(1)}));
  LinearGrads<T> g{Tensor<T>(), Tensor<T>(w.shape()), Tensor<T>({w.dim(1)})};
  linear_backward_accumulate(x, w, dy, g.dw, g.db, &g.dx);
  return g;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> out = x;
  for (T& v : out.data()) v = v > T{0} ? v : T{0};
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy) {
  if (x.shape() != dy.shape()) {
    throw DimensionError("relu backward: input " + to_string(x.shape()) + " vs upstream " +
                         to_string(dy.shape()));
  }
  Tensor<T> dx = dy;
  auto xs = x.data();
  auto ds = dx.data();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!(xs[i] > T{0})) ds[i] = T{0};
  }
  return dx;
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& kernels, const Tensor<T>& b,
                         std::size_t stride, std::size_t pad) {
  check_conv(x, kernels, stride, pad);
  if (b.rank() != 1 || b.dim(0) != kernels.dim(0)) {
    throw DimensionError("conv2d: bias " + to_string(b.shape()) + " vs kernels " + to_string(kernels.shape()));
  }
  const ConvGeometry g(x, kernels, stride, pad);
  Tensor<T> out({g.n, g.co, g.oh, g.ow});
  std::vector<T> cols(g.patch() * g.positions());
  for (std::size_t in = 0; in < g.n; ++in) {
    g.im2col(x.raw() + in * g.c * g.h * g.w, cols.data());
    T* y = out.raw() + in * g.co * g.positions();
    for (std::size_t o = 0; o < g.co; ++o) std::fill_n(y + o * g.positions(), g.positions(), b[o]);
    gemm::nn(g.co, g.positions(), g.patch(), kernels.raw(), cols.data(), y, true);
  }
  return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& kernels, const Tensor<T>& dy,
                               std::size_t stride, std::size_t pad) {
  check_conv(x, kernels, stride, pad);
  const ConvGeometry g(x, kernels, stride, pad);
  expect_shape(dy, Shape{g.n, g.co, g.oh, g.ow}, "conv2d backward upstream");

  Conv2dGrads<T> r{Tensor<T>(x.shape()), Tensor<T>(kernels.shape()), Tensor<T>({g.co})};
  // Kernels transposed once: [patch × co].
  std::vector<T> kt(g.patch() * g.co);
  for (std::size_t o = 0; o < g.co; ++o) {
    for (std::size_t q = 0; q < g.patch(); ++q) kt[q * g.co + o] = kernels.raw()[o * g.patch() + q];
  }
  std::vector<T> cols(g.patch() * g.positions());
  std::vector<T> dcols(g.patch() * g.positions());
  for (std::size_t in = 0; in < g.n; ++in) {
    const T* d = dy.raw() + in * g.co * g.positions();
    for (std::size_t o = 0; o < g.co; ++o) {
      T sum{0};
      for (std::size_t q = 0; q < g.positions(); ++q) sum += d[o * g.positions() + q];
      r.db[o] += sum;
    }
    g.im2col(x.raw() + in * g.c * g.h * g.w, cols.data());
    // dK[co × patch] += d[co × P] · cols[patch × P]ᵀ
    std::vector<T> dk(g.co * g.patch());
    gemm::nt(g.co, g.positions(), g.patch(), d, cols.data(), dk.data());
    for (std::size_t q = 0; q < dk.size(); ++q) r.dkernels.raw()[q] += dk[q];
    gemm::nn(g.patch(), g.positions(), g.co, kt.data(), d, dcols.data(), false);
    g.col2im(dcols.data(), r.dx.raw() + in * g.c * g.h * g.w);
  }
  return r;
}

template <typename T>
MaxPoolResult<T> maxpool2d_forward(const Tensor<T>& x, std::size_t window, std::size_t stride) {
  if (x.rank() != 4) throw DimensionError("maxpool2d: expected rank-4 input, got " + to_string(x.shape()));
  if (window == 0 || stride == 0) throw DimensionError("maxpool2d: window and stride must be >= 1");
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (window > h || window > w) {
    throw DimensionError("maxpool2d: window " + std::to_string(window) + " exceeds spatial extent of " +
                         to_string(x.shape()));
  }
  const std::size_t oh = (h - window) / stride + 1, ow = (w - window) / stride + 1;
  MaxPoolResult<T> r{Tensor<T>({n, c, oh, ow}), std::vector<std::size_t>(n * c * oh * ow), x.shape()};
  const T* xs = x.raw();
  std::size_t q = 0;
  for (std::size_t p = 0; p < n * c; ++p) {
    const std::size_t base = p * h * w;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t xo = 0; xo < ow; ++xo, ++q) {
        std::size_t best = base + (y * stride) * w + xo * stride;
        for (std::size_t i = 0; i < window; ++i) {
          for (std::size_t j = 0; j < window; ++j) {
            const std::size_t at = base + (y * stride + i) * w + xo * stride + j;
            if (xs[at] > xs[best]) best = at;
          }
        }
        r.out[q] = xs[best];
        r.argmax[q] = best;
      }
    }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool2d_backward(const MaxPoolResult<T>& fwd, const Tensor<T>& dy) {
  expect_shape(dy, fwd.out.shape(), "maxpool2d backward upstream");
  Tensor<T> dx(fwd.input_shape);
  for (std::size_t q = 0; q < fwd.argmax.size(); ++q) dx[fwd.argmax[q]] += dy[q];
  return dx;
}

template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw DimensionError("softmax_cross_entropy: logits " + to_string(logits.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  LossResult<T> r{T{0}, Tensor<T>(logits.shape())};
  double total = 0.0;
  const T inv_n = T{1} / static_cast<T>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw LabelError("softmax_cross_entropy: label " + std::to_string(label) + " at row " + std::to_string(i) +
                       " outside [0, " + std::to_string(classes) + ")");
    }
    auto row = logits.row(i);
    auto grow = r.grad.row(i);
    const T mx = *std::max_element(row.begin(), row.end());
    T denom{0};
    for (std::size_t j = 0; j < classes; ++j) {
      grow[j] = std::exp(row[j] - mx);
      denom += grow[j];
    }
    const T log_denom = std::log(denom);
    total += static_cast<double>(log_denom - (row[static_cast<std::size_t>(label)] - mx));
    for (std::size_t j = 0; j < classes; ++j) grow[j] = grow[j] / denom * inv_n;
    grow[static_cast<std::size_t>(label)] -= inv_n;
  }
  r.loss = static_cast<T>(total / static_cast<double>(n));
  return r;
}

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& logits) {
  if (logits.empty()) return {};
  const Tensor<T>& l = logits;
  const std::size_t rows = l.rank() == 1 ? 1 : l.dim(0);
  std::vector<int> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    auto r = l.rank() == 1 ? l.data() : l.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

#define PENET_INSTANTIATE(T)                                                                              \
  template Tensor<T> linear_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);              \
  template LinearGrads<T> linear_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);        \
  template void linear_backward_accumulate(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                           Tensor<T>&, Tensor<T>&, Tensor<T>*);                         \
  template Tensor<T> relu_forward(const Tensor<T>&);                                                     \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,   \
                                    std::size_t);                                                        \
  template Conv2dGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                                          std::size_t, std::size_t);                                     \
  template MaxPoolResult<T> maxpool2d_forward(const Tensor<T>&, std::size_t, std::size_t);               \
  template Tensor<T> maxpool2d_backward(const MaxPoolResult<T>&, const Tensor<T>&);                      \
  template LossResult<T> softmax_cross_entropy(const Tensor<T>&, std::span<const int>);                  \
  template std::vector<int> argmax_rows(const Tensor<T>&);

PENET_INSTANTIATE(float)
PENET_INSTANTIATE(double)
#undef PENET_INSTANTIATE

}  // namespace penet
