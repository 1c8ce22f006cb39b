#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "reactnet/error.hpp"
#include "reactnet/tensor.hpp"

// Forward and backward passes for the fixed layer set of the network. Every
// backward accumulates (+=) into parameter gradients and returns or overwrites
// the input gradient.
namespace reactnet::ops {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Padding { kSame, kValid };

struct ConvGeometry {
  int k = 1, pad = 0, out_h = 0, out_w = 0;
};

template <class T>
ConvGeometry conv_geometry(const Tensor4<T>& x, const Tensor4<T>& weight, Padding padding) {
  if (weight.c != x.c)
    throw ShapeError("conv2d: input has " + std::to_string(x.c) + " channels, weights expect " + std::to_string(weight.c));
  if (weight.h != weight.w || weight.h % 2 == 0) throw ShapeError("conv2d: kernel must be square with odd size");
  ConvGeometry g;
  g.k = weight.h;
  g.pad = padding == Padding::kSame ? g.k / 2 : 0;
  g.out_h = x.h + 2 * g.pad - g.k + 1;
  g.out_w = x.w + 2 * g.pad - g.k + 1;
  if (g.out_h < 1 || g.out_w < 1) throw ShapeError("conv2d: input smaller than kernel");
  return g;
}

// Unfolds sample `in` of x into a (C*k*k) x (out_h*out_w) matrix.
template <class T>
void im2col(const Tensor4<T>& x, int in, const ConvGeometry& g, RowMatrix<T>& cols) {
  const int k = g.k;
  cols.resize(static_cast<Eigen::Index>(x.c) * k * k, static_cast<Eigen::Index>(g.out_h) * g.out_w);
  for (int ic = 0; ic < x.c; ++ic) {
    const T* src = x.channel(in, ic);
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        T* dst = cols.data() + ((static_cast<Eigen::Index>(ic) * k + ky) * k + kx) * cols.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy + ky - g.pad;
          T* row = dst + static_cast<std::size_t>(oy) * g.out_w;
          if (iy < 0 || iy >= x.h) {
            std::fill(row, row + g.out_w, T(0));
            continue;
          }
          const T* srow = src + static_cast<std::size_t>(iy) * x.w;
          const int x0 = std::max(0, g.pad - kx);
          const int x1 = std::min(g.out_w, x.w + g.pad - kx);
          std::fill(row, row + std::min(x0, g.out_w), T(0));
          if (x1 > x0) std::copy(srow + x0 + kx - g.pad, srow + x1 + kx - g.pad, row + x0);
          if (x1 < g.out_w) std::fill(row + std::max(x1, 0), row + g.out_w, T(0));
        }
      }
  }
}

// Folds a column matrix back onto sample `in` of dx (accumulating).
template <class T>
void col2im(const RowMatrix<T>& cols, const ConvGeometry& g, Tensor4<T>& dx, int in) {
  const int k = g.k;
  for (int ic = 0; ic < dx.c; ++ic) {
    T* dst = dx.channel(in, ic);
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        const T* src = cols.data() + ((static_cast<Eigen::Index>(ic) * k + ky) * k + kx) * cols.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy + ky - g.pad;
          if (iy < 0 || iy >= dx.h) continue;
          const T* row = src + static_cast<std::size_t>(oy) * g.out_w;
          T* drow = dst + static_cast<std::size_t>(iy) * dx.w;
          const int x0 = std::max(0, g.pad - kx);
          const int x1 = std::min(g.out_w, dx.w + g.pad - kx);
          for (int ox = x0; ox < x1; ++ox) drow[ox + kx - g.pad] += row[ox];
        }
      }
  }
}

/// Cross-correlation. weight: (Cout, Cin, k, k), bias: (Cout, 1, 1, 1).
template <class T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const Tensor4<T>& weight, const Tensor4<T>& bias, Padding padding) {
  const ConvGeometry g = conv_geometry(x, weight, padding);
  if (bias.n != weight.n) throw ShapeError("conv2d: bias length differs from output channels");
  Tensor4<T> y(x.n, weight.n, g.out_h, g.out_w);
  const Eigen::Index kdim = static_cast<Eigen::Index>(weight.c) * g.k * g.k;
  const Eigen::Index hw = static_cast<Eigen::Index>(g.out_h) * g.out_w;
  Eigen::Map<const RowMatrix<T>> wmat(weight.data.data(), weight.n, kdim);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data.data(), weight.n);
  RowMatrix<T> cols;
  for (int in = 0; in < x.n; ++in) {
    Eigen::Map<RowMatrix<T>> out(y.channel(in, 0), weight.n, hw);
    if (g.k == 1) {
      Eigen::Map<const RowMatrix<T>> xin(x.channel(in, 0), x.c, hw);
      out.noalias() = wmat * xin;
    } else {
      im2col(x, in, g, cols);
      out.noalias() = wmat * cols;
    }
    out.colwise() += b;
  }
  return y;
}

/// Returns dx; accumulates into dweight and dbias.
/// With need_dx = false the input gradient is skipped and an empty tensor returned.
template <class T>
Tensor4<T> conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& weight, const Tensor4<T>& dy, Padding padding,
                           Tensor4<T>& dweight, Tensor4<T>& dbias, bool need_dx = true) {
  const ConvGeometry g = conv_geometry(x, weight, padding);
  if (dy.n != x.n || dy.c != weight.n || dy.h != g.out_h || dy.w != g.out_w)
    throw ShapeError("conv2d backward: gradient shape " + dy.shape_string() + " does not match output");
  require_same_shape(dweight, weight, "conv2d backward dweight");
  const Eigen::Index kdim = static_cast<Eigen::Index>(weight.c) * g.k * g.k;
  const Eigen::Index hw = static_cast<Eigen::Index>(g.out_h) * g.out_w;
  Eigen::Map<const RowMatrix<T>> wmat(weight.data.data(), weight.n, kdim);
  Eigen::Map<RowMatrix<T>> dw(dweight.data.data(), weight.n, kdim);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(dbias.data.data(), weight.n);

  Tensor4<T> dx;
  if (need_dx) dx = Tensor4<T>(x.n, x.c, x.h, x.w);
  RowMatrix<T> cols, dcols;
  for (int in = 0; in < x.n; ++in) {
    Eigen::Map<const RowMatrix<T>> dout(dy.channel(in, 0), weight.n, hw);
    db += dout.rowwise().sum();
    if (g.k == 1) {
      Eigen::Map<const RowMatrix<T>> xin(x.channel(in, 0), x.c, hw);
      dw.noalias() += dout * xin.transpose();
      if (!need_dx) continue;
      Eigen::Map<RowMatrix<T>> dxin(dx.channel(in, 0), x.c, hw);
      dxin.noalias() = wmat.transpose() * dout;
    } else {
      im2col(x, in, g, cols);
      dw.noalias() += dout * cols.transpose();
      if (!need_dx) continue;
      dcols.noalias() = wmat.transpose() * dout;
      col2im(dcols, g, dx, in);
    }
  }
  return dx;
}

template <class T>
Tensor4<T> relu_forward(const Tensor4<T>& x) {
  Tensor4<T> y = x;
  for (auto& v : y.data) v = v > T(0) ? v : T(0);
  return y;
}

/// Gradient routed through positions where the forward output was positive.
template <class T>
Tensor4<T> relu_backward(const Tensor4<T>& y, const Tensor4<T>& dy) {
  require_same_shape(y, dy, "relu backward");
  Tensor4<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y.data[i] > T(0))) dx.data[i] = T(0);
  return dx;
}

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

template <class T>
struct BatchNormCache {
  Tensor4<T> xhat;
  std::vector<double> invstd;
};

namespace detail {
template <class T>
void batchnorm_apply(const Tensor4<T>& x, int ic, double mean, double invstd, double g, double b, Tensor4<T>& y,
                     Tensor4<T>* xhat) {
  for (int in = 0; in < x.n; ++in) {
    const T* p = x.channel(in, ic);
    T* q = y.channel(in, ic);
    T* h = xhat ? xhat->channel(in, ic) : nullptr;
    for (std::size_t i = 0; i < x.plane(); ++i) {
      const double xh = (p[i] - mean) * invstd;
      if (h) h[i] = static_cast<T>(xh);
      q[i] = static_cast<T>(g * xh + b);
    }
  }
}

template <class T>
void require_bn_shapes(const Tensor4<T>& x, const Tensor4<T>& gamma, const Tensor4<T>& beta, const Tensor4<T>& rm,
                       const Tensor4<T>& rv) {
  if (gamma.n != x.c || beta.n != x.c || rm.n != x.c || rv.n != x.c)
    throw ShapeError("batchnorm: parameter length differs from channel count");
}
}  // namespace detail

/// Train mode: per-channel standardisation over (batch, height, width) with the
/// batch statistics, which are also folded into the running estimates as
/// running = momentum * running + (1 - momentum) * batch.
template <class T>
Tensor4<T> batchnorm_train(const Tensor4<T>& x, const Tensor4<T>& gamma, const Tensor4<T>& beta, Tensor4<T>& running_mean,
                           Tensor4<T>& running_var, BatchNormCache<T>* cache = nullptr) {
  detail::require_bn_shapes(x, gamma, beta, running_mean, running_var);
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  const std::size_t plane = x.plane();
  const double count = static_cast<double>(x.n) * static_cast<double>(plane);
  if (cache) {
    cache->xhat = Tensor4<T>(x.n, x.c, x.h, x.w);
    cache->invstd.assign(static_cast<std::size_t>(x.c), 0.0);
  }
  for (int ic = 0; ic < x.c; ++ic) {
    double mean = 0.0, var = 0.0;
    for (int in = 0; in < x.n; ++in) {
      const T* p = x.channel(in, ic);
      for (std::size_t i = 0; i < plane; ++i) mean += p[i];
    }
    mean /= count;
    for (int in = 0; in < x.n; ++in) {
      const T* p = x.channel(in, ic);
      for (std::size_t i = 0; i < plane; ++i) {
        const double d = p[i] - mean;
        var += d * d;
      }
    }
    var /= count;
    running_mean.data[ic] = static_cast<T>(kBatchNormMomentum * running_mean.data[ic] + (1.0 - kBatchNormMomentum) * mean);
    running_var.data[ic] = static_cast<T>(kBatchNormMomentum * running_var.data[ic] + (1.0 - kBatchNormMomentum) * var);
    const double invstd = 1.0 / std::sqrt(var + kBatchNormEps);
    if (cache) cache->invstd[ic] = invstd;
    detail::batchnorm_apply(x, ic, mean, invstd, gamma.data[ic], beta.data[ic], y, cache ? &cache->xhat : nullptr);
  }
  return y;
}

/// Eval mode: a fixed per-channel affine map built from the running statistics.
template <class T>
Tensor4<T> batchnorm_eval(const Tensor4<T>& x, const Tensor4<T>& gamma, const Tensor4<T>& beta, const Tensor4<T>& running_mean,
                          const Tensor4<T>& running_var) {
  detail::require_bn_shapes(x, gamma, beta, running_mean, running_var);
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  for (int ic = 0; ic < x.c; ++ic) {
    const double invstd = 1.0 / std::sqrt(static_cast<double>(running_var.data[ic]) + kBatchNormEps);
    detail::batchnorm_apply(x, ic, static_cast<double>(running_mean.data[ic]), invstd, gamma.data[ic], beta.data[ic], y,
                            static_cast<Tensor4<T>*>(nullptr));
  }
  return y;
}

/// Train-mode backward; returns dx and accumulates dgamma / dbeta.
template <class T>
Tensor4<T> batchnorm_backward(const BatchNormCache<T>& cache, const Tensor4<T>& gamma, const Tensor4<T>& dy, Tensor4<T>& dgamma,
                              Tensor4<T>& dbeta) {
  require_same_shape(cache.xhat, dy, "batchnorm backward");
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  const std::size_t plane = dy.plane();
  const double count = static_cast<double>(dy.n) * static_cast<double>(plane);
  for (int ic = 0; ic < dy.c; ++ic) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int in = 0; in < dy.n; ++in) {
      const T* d = dy.channel(in, ic);
      const T* h = cache.xhat.channel(in, ic);
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += d[i];
        sum_dy_xhat += static_cast<double>(d[i]) * h[i];
      }
    }
    dgamma.data[ic] += static_cast<T>(sum_dy_xhat);
    dbeta.data[ic] += static_cast<T>(sum_dy);
    const double scale = gamma.data[ic] * cache.invstd[ic] / count;
    for (int in = 0; in < dy.n; ++in) {
      const T* d = dy.channel(in, ic);
      const T* h = cache.xhat.channel(in, ic);
      T* o = dx.channel(in, ic);
      for (std::size_t i = 0; i < plane; ++i)
        o[i] = static_cast<T>(scale * (count * d[i] - sum_dy - h[i] * sum_dy_xhat));
    }
  }
  return dx;
}

/// 2x2 max pooling with stride 2. `argmax` receives the flat input index of
/// each output's winner, for routing the backward pass.
template <class T>
Tensor4<T> maxpool2_forward(const Tensor4<T>& x, std::vector<std::uint32_t>* argmax = nullptr) {
  if (x.h % 2 != 0 || x.w % 2 != 0) throw ShapeError("maxpool2: spatial size " + x.shape_string() + " is not even");
  Tensor4<T> y(x.n, x.c, x.h / 2, x.w / 2);
  if (argmax) argmax->assign(y.size(), 0);
  std::size_t o = 0;
  for (int in = 0; in < x.n; ++in)
    for (int ic = 0; ic < x.c; ++ic) {
      const std::size_t base = (static_cast<std::size_t>(in) * x.c + ic) * x.plane();
      for (int oy = 0; oy < y.h; ++oy)
        for (int ox = 0; ox < y.w; ++ox, ++o) {
          std::size_t best = base + static_cast<std::size_t>(2 * oy) * x.w + 2 * ox;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const std::size_t idx = base + static_cast<std::size_t>(2 * oy + dy) * x.w + 2 * ox + dx;
              if (x.data[idx] > x.data[best]) best = idx;
            }
          y.data[o] = x.data[best];
          if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(best);
        }
    }
  return y;
}

template <class T>
Tensor4<T> maxpool2_backward(const std::vector<std::uint32_t>& argmax, const Tensor4<T>& dy, int in_h, int in_w) {
  if (argmax.size() != dy.size()) throw ShapeError("maxpool2 backward: routing table size mismatch");
  Tensor4<T> dx(dy.n, dy.c, in_h, in_w);
  for (std::size_t o = 0; o < dy.size(); ++o) dx.data[argmax[o]] += dy.data[o];
  return dx;
}

enum class Upsampling { kNearest, kBilinear };

namespace detail {
// Source taps of a half-pixel-centred bilinear resize along one axis.
struct BilinearTap {
  int lo, hi;
  double frac;
};

inline std::vector<BilinearTap> bilinear_taps(int in, int factor) {
  std::vector<BilinearTap> taps(static_cast<std::size_t>(in) * factor);
  for (int o = 0; o < in * factor; ++o) {
    double src = (o + 0.5) / factor - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, in - 1);
    taps[static_cast<std::size_t>(o)] = {lo, hi, src - lo};
  }
  return taps;
}
}  // namespace detail

template <class T>
Tensor4<T> upsample_forward(const Tensor4<T>& x, int factor, Upsampling mode = Upsampling::kNearest) {
  if (factor < 1) throw ShapeError("upsample: factor must be >= 1");
  Tensor4<T> y(x.n, x.c, x.h * factor, x.w * factor);
  if (mode == Upsampling::kNearest) {
    for (int in = 0; in < x.n; ++in)
      for (int ic = 0; ic < x.c; ++ic) {
        const T* p = x.channel(in, ic);
        T* q = y.channel(in, ic);
        for (int oy = 0; oy < y.h; ++oy)
          for (int ox = 0; ox < y.w; ++ox) q[static_cast<std::size_t>(oy) * y.w + ox] = p[static_cast<std::size_t>(oy / factor) * x.w + ox / factor];
      }
    return y;
  }
  const auto ty = detail::bilinear_taps(x.h, factor);
  const auto tx = detail::bilinear_taps(x.w, factor);
  for (int in = 0; in < x.n; ++in)
    for (int ic = 0; ic < x.c; ++ic) {
      const T* p = x.channel(in, ic);
      T* q = y.channel(in, ic);
      for (int oy = 0; oy < y.h; ++oy) {
        const auto& a = ty[static_cast<std::size_t>(oy)];
        for (int ox = 0; ox < y.w; ++ox) {
          const auto& b = tx[static_cast<std::size_t>(ox)];
          const double top = (1 - b.frac) * p[static_cast<std::size_t>(a.lo) * x.w + b.lo] + b.frac * p[static_cast<std::size_t>(a.lo) * x.w + b.hi];
          const double bot = (1 - b.frac) * p[static_cast<std::size_t>(a.hi) * x.w + b.lo] + b.frac * p[static_cast<std::size_t>(a.hi) * x.w + b.hi];
          q[static_cast<std::size_t>(oy) * y.w + ox] = static_cast<T>((1 - a.frac) * top + a.frac * bot);
        }
      }
    }
  return y;
}

template <class T>
Tensor4<T> upsample_backward(const Tensor4<T>& dy, int factor, Upsampling mode = Upsampling::kNearest) {
  if (factor < 1 || dy.h % factor != 0 || dy.w % factor != 0) throw ShapeError("upsample backward: bad factor");
  Tensor4<T> dx(dy.n, dy.c, dy.h / factor, dy.w / factor);
  if (mode == Upsampling::kNearest) {
    for (int in = 0; in < dy.n; ++in)
      for (int ic = 0; ic < dy.c; ++ic) {
        const T* p = dy.channel(in, ic);
        T* q = dx.channel(in, ic);
        for (int oy = 0; oy < dy.h; ++oy)
          for (int ox = 0; ox < dy.w; ++ox) q[static_cast<std::size_t>(oy / factor) * dx.w + ox / factor] += p[static_cast<std::size_t>(oy) * dy.w + ox];
      }
    return dx;
  }
  const auto ty = detail::bilinear_taps(dx.h, factor);
  const auto tx = detail::bilinear_taps(dx.w, factor);
  for (int in = 0; in < dy.n; ++in)
    for (int ic = 0; ic < dy.c; ++ic) {
      const T* p = dy.channel(in, ic);
      T* q = dx.channel(in, ic);
      for (int oy = 0; oy < dy.h; ++oy) {
        const auto& a = ty[static_cast<std::size_t>(oy)];
        for (int ox = 0; ox < dy.w; ++ox) {
          const auto& b = tx[static_cast<std::size_t>(ox)];
          const double g = p[static_cast<std::size_t>(oy) * dy.w + ox];
          q[static_cast<std::size_t>(a.lo) * dx.w + b.lo] += static_cast<T>(g * (1 - a.frac) * (1 - b.frac));
          q[static_cast<std::size_t>(a.lo) * dx.w + b.hi] += static_cast<T>(g * (1 - a.frac) * b.frac);
          q[static_cast<std::size_t>(a.hi) * dx.w + b.lo] += static_cast<T>(g * a.frac * (1 - b.frac));
          q[static_cast<std::size_t>(a.hi) * dx.w + b.hi] += static_cast<T>(g * a.frac * b.frac);
        }
      }
    }
  return dx;
}

template <class T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a, b, "add");
  Tensor4<T> y = a;
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += b.data[i];
  return y;
}

template <class T>
void add_inplace(Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a, b, "add");
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
}

template <class T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <class T>
Tensor4<T> sigmoid_forward(const Tensor4<T>& x) {
  Tensor4<T> y = x;
  for (auto& v : y.data) v = sigmoid(v);
  return y;
}

template <class T>
Tensor4<T> sigmoid_backward(const Tensor4<T>& y, const Tensor4<T>& dy) {
  require_same_shape(y, dy, "sigmoid backward");
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] = dy.data[i] * y.data[i] * (T(1) - y.data[i]);
  return dx;
}

}  // namespace reactnet::ops
