#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "reactnet/tensor.hpp"

namespace reactnet {

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

template <class Rng>
Tensor4<double> random_tensor(int n, int c, int h, int w, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Tensor4<double> t(n, c, h, w);
  for (auto& v : t.data) v = gauss(rng);
  return t;
}

/// Pushes values away from the ReLU kink at zero by `offset`.
inline void move_away_from_zero(Tensor4<double>& x, double offset = 0.1) {
  for (auto& v : x.data) v += v >= 0.0 ? offset : -offset;
}

/// Spreads the values of every 2x2 pooling window at least `gap` apart while
/// keeping their order, so central differences never swap a window's maximum.
inline void separate_pool_windows(Tensor4<double>& x, double gap = 0.1) {
  for (int in = 0; in < x.n; ++in)
    for (int ic = 0; ic < x.c; ++ic)
      for (int y = 0; y + 1 < x.h; y += 2)
        for (int xx = 0; xx + 1 < x.w; xx += 2) {
          double* cell[4] = {&x.at(in, ic, y, xx), &x.at(in, ic, y, xx + 1), &x.at(in, ic, y + 1, xx), &x.at(in, ic, y + 1, xx + 1)};
          std::sort(std::begin(cell), std::end(cell), [](double* a, double* b) { return *a < *b; });
          for (int k = 1; k < 4; ++k)
            if (*cell[k] < *cell[k - 1] + gap) *cell[k] = *cell[k - 1] + gap;
        }
}

/// Maximum element-wise relative error between an analytic gradient and
/// central differences of a scalar function of `inputs`.
/// `loss` is evaluated with `inputs` perturbed in place and must read them on every call.
template <class Loss>
double gradcheck(std::vector<double>& inputs, const std::vector<double>& analytic, Loss&& loss, double h = 1e-4) {
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double saved = inputs[i];
    inputs[i] = saved + h;
    const long double up = loss();
    inputs[i] = saved - h;
    const long double down = loss();
    inputs[i] = saved;
    const auto numeric = static_cast<double>((up - down) / (2.0L * static_cast<long double>(h)));
    worst = std::max(worst, relative_error(analytic[i], numeric));
  }
  return worst;
}

/// Checks the backward pass of a tensor operation y = forward(x).
///
/// The scalar probe is L = sum(r * forward(x)) with a seeded random r, whose
/// analytic gradient is backward(x, r). `forward` and `backward` may close over
/// extra state (weights, caches) as long as both are pure functions of x.
template <class Forward, class Backward>
double gradcheck_op(Forward&& forward, Backward&& backward, Tensor4<double> x, std::uint64_t seed, double h = 1e-4) {
  std::mt19937_64 rng(seed);
  const Tensor4<double> y0 = forward(x);
  const Tensor4<double> r = random_tensor(y0.n, y0.c, y0.h, y0.w, rng);
  const Tensor4<double> dx = backward(x, r);
  auto probe = [&] {
    const Tensor4<double> y = forward(x);
    // extended accumulator: the probe sums many terms and only one of them moves
    long double acc = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) acc += static_cast<long double>(r.data[i]) * y.data[i];
    return acc;
  };
  return gradcheck(x.data, dx.data, probe, h);
}

}  // namespace reactnet
