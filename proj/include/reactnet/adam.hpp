#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "reactnet/error.hpp"
#include "reactnet/tensor.hpp"

namespace reactnet {

template <class T>
struct AdamState {
  std::int64_t t = 0;
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<Tensor4<T>> m;
  std::vector<Tensor4<T>> v;
};

/// One bias-corrected Adam update over `params`, using their accumulated gradients.
/// Moment buffers are created on the first call.
template <class T>
void adam_step(std::span<Param<T>* const> params, AdamState<T>& state) {
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
      state.v.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam: parameter count changed between steps");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto* p = params[k];
    require_same_shape(p->grad, p->value, "adam gradient");
    require_same_shape(state.m[k], p->value, "adam moment");
    if (!p->grad.all_finite()) throw NumericError("non-finite gradient for parameter '" + p->name + "'");
  }

  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = params[k]->value.data;
    const auto& grad = params[k]->grad.data;
    auto& m = state.m[k].data;
    auto& v = state.v[k].data;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      const double mi = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      const double vi = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      value[i] = static_cast<T>(value[i] - state.lr * (mi / c1) / (std::sqrt(vi / c2) + state.eps));
    }
  }
}

}  // namespace reactnet
