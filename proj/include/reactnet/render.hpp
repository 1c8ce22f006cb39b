#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"

namespace reactnet {

struct RgbImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto i = 3 * (static_cast<std::size_t>(y) * width + x);
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
};

/// Min-max scales a matrix to 0..255 grey levels (all zero if constant).
inline std::vector<std::uint8_t> to_gray(const Eigen::MatrixXd& m) {
  const double lo = m.minCoeff(), hi = m.maxCoeff();
  std::vector<std::uint8_t> g(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = hi > lo ? (m(r, c) - lo) / (hi - lo) : 0.0;
      g[static_cast<std::size_t>(r * m.cols() + c)] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  return g;
}

/// Height of one label bar under an n-pixel matrix: 5% of n, rounded up.
inline int bar_height(Eigen::Index n) { return static_cast<int>(std::ceil(0.05 * static_cast<double>(n))); }

/// Grey distance matrix with optional label bars stacked underneath
/// (prediction first, then ground truth): green marks repetitive frames, red the rest.
inline RgbImage render_matrix(const Eigen::MatrixXd& m, const std::optional<FrameLabels>& pred,
                              const std::optional<FrameLabels>& truth) {
  const auto n = static_cast<int>(m.rows());
  if (m.rows() != m.cols() || n < 1) throw ShapeError("render expects a non-empty square matrix");
  for (const auto* bar : {&pred, &truth})
    if (*bar && static_cast<int>((*bar)->size()) != n) throw SizeMismatchError("label bar length differs from matrix size");

  const int bh = bar_height(n);
  RgbImage img;
  img.width = n;
  img.height = n + (pred ? bh : 0) + (truth ? bh : 0);
  img.rgb.assign(3 * static_cast<std::size_t>(img.width) * img.height, 0);
  const auto gray = to_gray(m);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const auto v = gray[static_cast<std::size_t>(y) * n + x];
      img.set(x, y, v, v, v);
    }
  int row = n;
  for (const auto* bar : {&pred, &truth}) {
    if (!*bar) continue;
    for (int y = row; y < row + bh; ++y)
      for (int x = 0; x < n; ++x) {
        if ((**bar)[static_cast<std::size_t>(x)])
          img.set(x, y, 0, 255, 0);
        else
          img.set(x, y, 255, 0, 0);
      }
    row += bh;
  }
  return img;
}

inline void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

inline void save_pgm(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto gray = to_gray(m);
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace reactnet
