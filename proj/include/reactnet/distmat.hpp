#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"

namespace reactnet {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Pairwise Euclidean distances between the frames of one video.
struct DistanceMatrix {
  Eigen::MatrixXd values;

  Eigen::Index n() const { return values.rows(); }
};

/// a(i, j) = 1 iff frames i and j lie in the same repetitive segment.
struct AnnotationMatrix {
  BinaryMatrix values;

  Eigen::Index n() const { return values.rows(); }
};

inline DistanceMatrix build_distance_matrix(const FrameEmbeddingSequence& seq) {
  seq.validate();
  const Eigen::Index n = seq.n_frames();
  const Eigen::Index dim = seq.dim();
  DistanceMatrix m;
  m.values = Eigen::MatrixXd::Zero(n, n);
  // promote once so every pair is accumulated in double
  const Eigen::MatrixXd x = seq.data.cast<double>();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = x(i, d) - x(j, d);
        acc += diff * diff;
      }
      const double dist = std::sqrt(acc);
      m.values(i, j) = dist;
      m.values(j, i) = dist;
    }
  }
  return m;
}

inline AnnotationMatrix build_annotation_matrix(Eigen::Index n, const SegmentAnnotation& ann) {
  if (n < 1) throw BoundsError("annotation matrix needs n >= 1");
  ann.validate(n);
  AnnotationMatrix a;
  a.values = BinaryMatrix::Zero(n, n);
  for (const auto& s : ann.segments) {
    const auto len = static_cast<Eigen::Index>(s.length());
    a.values.block(static_cast<Eigen::Index>(s.start), static_cast<Eigen::Index>(s.start), len, len).setOnes();
  }
  return a;
}

/// Rescales to [0, 1]; a constant matrix maps to all zeros.
inline Eigen::MatrixXd normalize_minmax(const Eigen::MatrixXd& x) {
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (!(hi > lo)) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  return (x.array() - lo) / (hi - lo);
}

}  // namespace reactnet
