#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reactnet/distmat.hpp"
#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"
#include "reactnet/lanczos.hpp"
#include "reactnet/net.hpp"
#include "reactnet/subblocks.hpp"

namespace reactnet {

enum class FrameScoreRule { kDiagonal, kRowMean };

struct InferConfig {
  Eigen::Index window = 140;
  Eigen::Index stride = 35;
  double threshold = 0.5;
  FrameScoreRule rule = FrameScoreRule::kDiagonal;
  // When non-zero, must equal the model's canonical size.
  int canonical = 0;

  void validate() const {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (stride < 1 || stride > window) throw ConfigError("stride must satisfy 1 <= stride <= window");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  }
};

/// Per-frame scores of one window: frame_scores[i] belongs to frame start + i.
struct WindowPrediction {
  Eigen::Index start = 0;
  Eigen::Index size = 0;
  std::vector<double> frame_scores;
};

struct FrameScores {
  std::vector<double> mean;          // P_f
  std::vector<std::int64_t> counts;  // n_f
  FrameLabels labels;                // P_f > T

  std::size_t n() const { return mean.size(); }
};

/// Window starts along the diagonal: 0, stride, 2*stride, ... with the last
/// window shifted inward to end at frame n - 1. Windows longer than n shrink to n.
inline std::vector<Eigen::Index> window_starts(Eigen::Index n, Eigen::Index window, Eigen::Index stride) {
  const Eigen::Index size = std::min(window, n);
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0;; s += stride) {
    const Eigen::Index st = std::min(s, n - size);
    starts.push_back(st);
    if (st == n - size) break;
  }
  return starts;
}

/// Runs `predictor` (canonical normalised block -> canonical probability block)
/// over every diagonal window of m and maps each prediction back to per-frame
/// scores at native resolution.
template <class Predictor>
std::vector<WindowPrediction> predict_windows(Predictor&& predictor, Eigen::Index canonical, const InferConfig& infer,
                                              const DistanceMatrix& m) {
  infer.validate();
  const Eigen::Index n = m.n();
  if (n < 2) throw ShapeError("inference needs at least 2 frames");
  const Eigen::Index size = std::min(infer.window, n);
  std::vector<WindowPrediction> out;
  for (Eigen::Index start : window_starts(n, infer.window, infer.stride)) {
    const Eigen::MatrixXd input = prepare_network_input(m.values.block(start, start, size, size), canonical);
    const Eigen::MatrixXd pred = predictor(input);
    if (pred.rows() != canonical || pred.cols() != canonical) throw ShapeError("predictor returned a block of the wrong size");
    const Eigen::MatrixXd native = lanczos_resize(pred, size).cwiseMax(0.0).cwiseMin(1.0);
    WindowPrediction w{start, size, std::vector<double>(static_cast<std::size_t>(size))};
    for (Eigen::Index i = 0; i < size; ++i)
      w.frame_scores[static_cast<std::size_t>(i)] = infer.rule == FrameScoreRule::kDiagonal ? native(i, i) : native.row(i).mean();
    out.push_back(std::move(w));
  }
  return out;
}

/// P_f = (sum of the scores of every window covering f) / n_f, summed in
/// window order; a frame is repetitive iff P_f > threshold.
inline FrameScores aggregate_frame_scores(Eigen::Index n, const std::vector<WindowPrediction>& windows, double threshold) {
  FrameScores s;
  s.mean.assign(static_cast<std::size_t>(n), 0.0);
  s.counts.assign(static_cast<std::size_t>(n), 0);
  for (const auto& w : windows) {
    if (w.start < 0 || w.start + w.size > n || static_cast<Eigen::Index>(w.frame_scores.size()) != w.size)
      throw BoundsError("window outside the frame range");
    for (Eigen::Index i = 0; i < w.size; ++i) {
      s.mean[static_cast<std::size_t>(w.start + i)] += w.frame_scores[static_cast<std::size_t>(i)];
      ++s.counts[static_cast<std::size_t>(w.start + i)];
    }
  }
  s.labels.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t f = 0; f < s.mean.size(); ++f) {
    if (s.counts[f] == 0) throw BoundsError("frame " + std::to_string(f) + " is not covered by any window");
    s.mean[f] /= static_cast<double>(s.counts[f]);
    s.labels[f] = s.mean[f] > threshold ? 1 : 0;
  }
  return s;
}

/// Eval-mode network output of the final stage as a predictor for predict_windows.
template <class T>
auto network_predictor(const ReActNet<T>& model) {
  return [&model](const Eigen::MatrixXd& block) {
    const int side = model.config().canonical;
    Tensor4<T> x(1, 1, side, side);
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) x.at(0, 0, r, c) = static_cast<T>(block(r, c));
    const auto preds = model.predict(x);
    Eigen::MatrixXd out(side, side);
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) out(r, c) = preds.back().at(0, 0, r, c);
    return out;
  };
}

template <class T>
FrameScores predict_frames(const ReActNet<T>& model, const InferConfig& infer, const DistanceMatrix& m) {
  infer.validate();
  const int canonical = model.config().canonical;
  if (infer.canonical != 0 && infer.canonical != canonical)
    throw ConfigError("requested canonical size " + std::to_string(infer.canonical) + " but the model uses " +
                      std::to_string(canonical));
  return aggregate_frame_scores(m.n(), predict_windows(network_predictor(model), canonical, infer, m), infer.threshold);
}

/// Maximal runs of repetitive labels, dropping runs shorter than min_len.
inline SegmentAnnotation extract_segments(const FrameLabels& labels, std::int64_t min_len = 1) {
  SegmentAnnotation ann;
  const auto n = static_cast<std::int64_t>(labels.size());
  for (std::int64_t f = 0; f < n;) {
    if (!labels[static_cast<std::size_t>(f)]) {
      ++f;
      continue;
    }
    std::int64_t e = f;
    while (e + 1 < n && labels[static_cast<std::size_t>(e + 1)]) ++e;
    if (e - f + 1 >= min_len) ann.segments.push_back({f, e});
    f = e + 1;
  }
  return ann;
}

inline SegmentAnnotation extract_segments(const FrameScores& scores, std::int64_t min_len = 1) {
  return extract_segments(scores.labels, min_len);
}

// Score file: one "index P_f label" line per frame.

inline void write_scores(std::ostream& out, const FrameScores& s) {
  char buf[64];
  for (std::size_t f = 0; f < s.n(); ++f) {
    std::snprintf(buf, sizeof buf, "%zu %.6f %d\n", f, s.mean[f], static_cast<int>(s.labels[f]));
    out << buf;
  }
}

inline void save_scores(const FrameScores& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_scores(out, s);
  if (!out) throw IoError("failed writing " + path.string());
}

/// Reads a score file back. Counts are not stored and come back as 1.
inline FrameScores parse_scores(std::istream& in, const std::string& source = "<scores>") {
  FrameScores s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long index = -1;
    double p = 0.0;
    int label = -1;
    std::string extra;
    if (!(ls >> index >> p >> label) || (ls >> extra) || index != static_cast<long long>(s.n()) || (label != 0 && label != 1))
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected 'index score label': '" + line + "'");
    s.mean.push_back(p);
    s.counts.push_back(1);
    s.labels.push_back(static_cast<std::uint8_t>(label));
  }
  return s;
}

inline FrameScores load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_scores(in, path.string());
}

}  // namespace reactnet
