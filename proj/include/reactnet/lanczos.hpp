#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reactnet/error.hpp"

namespace reactnet {

inline constexpr int kLanczosSupport = 3;

/// Lanczos-3 window: sinc(x) * sinc(x / 3) inside |x| < 3, zero outside.
inline double lanczos_kernel(double x) {
  constexpr double a = kLanczosSupport;
  if (x == 0.0) return 1.0;
  if (std::abs(x) >= a) return 0.0;
  const double px = std::numbers::pi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

/// Row-stochastic (out x in) resampling operator along one axis.
///
/// Output pixel i samples the source at the pixel-centre aligned coordinate
/// (i + 0.5) * in / out - 0.5. When shrinking, the kernel is stretched by the
/// scale factor so that it also acts as a low-pass filter. Taps falling outside
/// the source are clamped to the nearest edge sample and the weights of each
/// output pixel are normalised to sum to one.
inline Eigen::MatrixXd lanczos_weights(Eigen::Index in_size, Eigen::Index out_size) {
  if (in_size < 1 || out_size < 1) throw ShapeError("lanczos resize needs sizes >= 1");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(out_size, in_size);
  const double ratio = static_cast<double>(in_size) / static_cast<double>(out_size);
  const double stretch = std::max(1.0, ratio);
  const double radius = kLanczosSupport * stretch;
  for (Eigen::Index i = 0; i < out_size; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    const auto first = static_cast<Eigen::Index>(std::floor(centre - radius));
    const auto last = static_cast<Eigen::Index>(std::ceil(centre + radius));
    double total = 0.0;
    for (Eigen::Index j = first; j <= last; ++j) {
      const double k = lanczos_kernel((static_cast<double>(j) - centre) / stretch);
      if (k == 0.0) continue;
      w(i, std::clamp<Eigen::Index>(j, 0, in_size - 1)) += k;
      total += k;
    }
    w.row(i) /= total;
  }
  return w;
}

/// Separable Lanczos-3 resampling of a square block to out_size x out_size.
inline Eigen::MatrixXd lanczos_resize(const Eigen::MatrixXd& block, Eigen::Index out_size) {
  if (block.rows() != block.cols()) throw ShapeError("lanczos_resize expects a square block");
  const Eigen::MatrixXd w = lanczos_weights(block.rows(), out_size);
  return w * block * w.transpose();
}

}  // namespace reactnet
