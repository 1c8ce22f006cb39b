#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "reactnet/distmat.hpp"
#include "reactnet/error.hpp"
#include "reactnet/lanczos.hpp"

namespace reactnet {

struct SamplerConfig {
  Eigen::Index stride = 25;
  Eigen::Index size_min = 100;
  Eigen::Index size_max = 200;
  Eigen::Index canonical = 140;

  void validate() const {
    if (stride < 1) throw ConfigError("sampler stride must be >= 1");
    if (size_min < 2 || size_max < size_min) throw ConfigError("sampler size range must satisfy 2 <= min <= max");
    if (canonical < 1) throw ConfigError("canonical size must be >= 1");
  }
};

/// A square window on the main diagonal, covering frames [start, start + size).
struct SubBlock {
  Eigen::Index center = 0;
  Eigen::Index start = 0;
  Eigen::Index size = 0;
  Eigen::MatrixXd input;   // crop of M
  BinaryMatrix target;     // crop of A over the same range
  // Network-ready versions at canonical resolution: the input is resized and
  // then min-max normalised, the target is resized and re-thresholded at 0.5.
  Eigen::MatrixXd resized_input;
  BinaryMatrix resized_target;
};

/// Start index of a size-wide window centred on `center`, shifted inward so it
/// stays inside [0, n).
inline Eigen::Index window_start(Eigen::Index center, Eigen::Index size, Eigen::Index n) {
  return std::clamp<Eigen::Index>(center - size / 2, 0, n - size);
}

inline Eigen::MatrixXd prepare_network_input(const Eigen::MatrixXd& crop, Eigen::Index canonical) {
  return normalize_minmax(lanczos_resize(crop, canonical));
}

inline BinaryMatrix resize_binary(const BinaryMatrix& target, Eigen::Index canonical) {
  const Eigen::MatrixXd r = lanczos_resize(target.cast<double>(), canonical);
  return (r.array() >= 0.5).cast<std::uint8_t>();
}

inline SubBlock make_subblock(const DistanceMatrix& m, const AnnotationMatrix& a, Eigen::Index center, Eigen::Index start,
                              Eigen::Index size, Eigen::Index canonical) {
  SubBlock b;
  b.center = center;
  b.start = start;
  b.size = size;
  b.input = m.values.block(start, start, size, size);
  b.target = a.values.block(start, start, size, size);
  b.resized_input = prepare_network_input(b.input, canonical);
  b.resized_target = resize_binary(b.target, canonical);
  return b;
}

/// Enumerates diagonal centres at the configured stride and crops one block of
/// random size around each. Sizes are drawn uniformly from the configured
/// range clamped to n; if n is below the minimum size the whole matrix is the
/// only block.
template <class Rng>
std::vector<SubBlock> sample_training_subblocks(const DistanceMatrix& m, const AnnotationMatrix& a, const SamplerConfig& cfg,
                                                Rng& rng) {
  cfg.validate();
  const Eigen::Index n = m.n();
  if (n < 2) throw ShapeError("sub-block sampling needs n >= 2");
  if (a.n() != n) throw ShapeError("distance and annotation matrices differ in size");

  std::vector<SubBlock> blocks;
  if (n < cfg.size_min) {
    blocks.push_back(make_subblock(m, a, n / 2, 0, n, cfg.canonical));
    return blocks;
  }
  std::uniform_int_distribution<Eigen::Index> size_dist(cfg.size_min, std::min(cfg.size_max, n));
  for (Eigen::Index center = 0; center < n; center += cfg.stride) {
    const Eigen::Index size = size_dist(rng);
    blocks.push_back(make_subblock(m, a, center, window_start(center, size, n), size, cfg.canonical));
  }
  return blocks;
}

}  // namespace reactnet
