#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "reactnet/error.hpp"

namespace reactnet {

/// Dense NCHW tensor.
template <class T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

  T& at(int in, int ic, int y, int x) { return data[((static_cast<std::size_t>(in) * c + ic) * h + y) * w + x]; }
  T at(int in, int ic, int y, int x) const { return data[((static_cast<std::size_t>(in) * c + ic) * h + y) * w + x]; }

  T* channel(int in, int ic) { return data.data() + (static_cast<std::size_t>(in) * c + ic) * plane(); }
  const T* channel(int in, int ic) const { return data.data() + (static_cast<std::size_t>(in) * c + ic) * plane(); }

  bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  void zero() { std::fill(data.begin(), data.end(), T(0)); }
  bool all_finite() const {
    return std::all_of(data.begin(), data.end(), [](T v) { return std::isfinite(v); });
  }
  std::string shape_string() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
  }

  template <class U>
  Tensor4<U> cast() const {
    Tensor4<U> out(n, c, h, w);
    std::transform(data.begin(), data.end(), out.data.begin(), [](T v) { return static_cast<U>(v); });
    return out;
  }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;
};

template <class T>
void require_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": shape " + a.shape_string() + " vs " + b.shape_string());
}

/// A learnable tensor together with its gradient accumulator.
template <class T>
struct Param {
  std::string name;
  Tensor4<T> value;
  Tensor4<T> grad;

  Param() = default;
  Param(std::string name_, Tensor4<T> v) : name(std::move(name_)), value(std::move(v)) {
    grad = Tensor4<T>(value.n, value.c, value.h, value.w);
  }
  void zero_grad() { grad.zero(); }
};

}  // namespace reactnet
