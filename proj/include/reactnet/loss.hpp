#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "reactnet/error.hpp"
#include "reactnet/tensor.hpp"

namespace reactnet {

inline constexpr double kProbabilityClamp = 1e-7;

inline double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

/// Binary cross entropy of one prediction, natural log.
inline double bce(double y, double p) {
  p = clamp_probability(p);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

/// Weighted binary cross entropy: w scales the positive term, (1 - w) the negative one.
inline double wbce(double y, double p, double w) {
  p = clamp_probability(p);
  return -(w * y * std::log(p) + (1.0 - w) * (1.0 - y) * std::log(1.0 - p));
}

template <class T>
struct LossResult {
  double value = 0.0;
  Tensor4<T> grad_logits;  // d(mean loss) / d(pre-sigmoid logits)
};

/// Mean WBCE over every element of a prediction block (all samples, all pixels).
///
/// The logit gradient is the analytic (1 - w)(1 - y) p - w y (1 - p), i.e. the
/// clamp that protects the logarithms does not zero the gradient of saturated
/// predictions.
template <class T>
LossResult<T> wbce_loss(const Tensor4<T>& p, const Tensor4<T>& y, double w) {
  if (!(w > 0.0 && w < 1.0)) throw ParamError("WBCE weight must lie in (0, 1), got " + std::to_string(w));
  require_same_shape(p, y, "wbce_loss");
  LossResult<T> r;
  r.grad_logits = Tensor4<T>(p.n, p.c, p.h, p.w);
  const double inv = 1.0 / static_cast<double>(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.data[i], yi = y.data[i];
    acc += wbce(yi, pi, w);
    r.grad_logits.data[i] = static_cast<T>(((1.0 - w) * (1.0 - yi) * pi - w * yi * (1.0 - pi)) * inv);
  }
  r.value = acc * inv;
  return r;
}

}  // namespace reactnet
