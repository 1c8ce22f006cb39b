#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reactnet/binary_io.hpp"
#include "reactnet/error.hpp"

namespace reactnet {

using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-frame feature vectors of one video, one row per frame.
struct FrameEmbeddingSequence {
  EmbeddingMatrix data;
  std::optional<float> fps;

  Eigen::Index n_frames() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }

  void validate() const {
    if (data.rows() < 1 || data.cols() < 1) throw DataError("embedding sequence must have n_frames >= 1 and dim >= 1");
    if (!data.allFinite()) throw DataError("embedding sequence contains non-finite values");
    if (fps && !std::isfinite(*fps)) throw DataError("fps must be finite");
  }

  friend bool operator==(const FrameEmbeddingSequence& a, const FrameEmbeddingSequence& b) {
    if (a.data.rows() != b.data.rows() || a.data.cols() != b.data.cols()) return false;
    if (a.fps.has_value() != b.fps.has_value()) return false;
    if (a.fps && std::bit_cast<std::uint32_t>(*a.fps) != std::bit_cast<std::uint32_t>(*b.fps)) return false;
    // bitwise, so that round-trips are checked exactly
    return std::memcmp(a.data.data(), b.data.data(), sizeof(float) * a.data.size()) == 0;
  }
};

/// Inclusive frame interval [start, end].
struct Segment {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start + 1; }
  bool contains(std::int64_t f) const { return f >= start && f <= end; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

using FrameLabels = std::vector<std::uint8_t>;

/// Repetitive segments of a video, sorted and pairwise disjoint.
struct SegmentAnnotation {
  std::vector<Segment> segments;

  friend bool operator==(const SegmentAnnotation&, const SegmentAnnotation&) = default;

  void validate(std::int64_t n_frames) const {
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const auto& s = segments[k];
      if (s.start < 0 || s.end < s.start || s.end >= n_frames)
        throw BoundsError("segment (" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                          ") outside [0, " + std::to_string(n_frames) + ")");
      if (k > 0 && s.start <= segments[k - 1].end)
        throw BoundsError("segments must be sorted and disjoint (segment " + std::to_string(k) + ")");
    }
  }

  /// Expands the segment list into one 0/1 label per frame.
  FrameLabels to_labels(std::int64_t n_frames) const {
    validate(n_frames);
    FrameLabels labels(static_cast<std::size_t>(n_frames), 0);
    for (const auto& s : segments)
      for (auto f = s.start; f <= s.end; ++f) labels[static_cast<std::size_t>(f)] = 1;
    return labels;
  }
};

// ---------------------------------------------------------------------------
// REMB binary format
//   "REMB" | u32 version=1 | u32 n_frames | u32 dim | f32[n_frames*dim] | [f32 fps]
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kRembVersion = 1;

inline void write_embeddings(std::ostream& out, const FrameEmbeddingSequence& seq) {
  seq.validate();
  binio::write_magic(out, "REMB");
  binio::write_u32(out, kRembVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(seq.n_frames()));
  binio::write_u32(out, static_cast<std::uint32_t>(seq.dim()));
  const float* p = seq.data.data();
  for (Eigen::Index i = 0; i < seq.data.size(); ++i) binio::write_f32(out, p[i]);
  if (seq.fps) binio::write_f32(out, *seq.fps);
}

inline void save_embeddings(const FrameEmbeddingSequence& seq, const std::filesystem::path& path) {
  seq.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_embeddings(out, seq);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline FrameEmbeddingSequence read_embeddings(std::istream& in, std::uint64_t total_bytes) {
  if (!binio::read_magic(in, "REMB")) throw FormatError("bad REMB magic");
  const auto version = binio::read_u32(in, "REMB version");
  if (version != kRembVersion) throw FormatError("unsupported REMB version " + std::to_string(version));
  const std::uint64_t n = binio::read_u32(in, "REMB n_frames");
  const std::uint64_t d = binio::read_u32(in, "REMB dim");
  if (n == 0 || d == 0) throw FormatError("REMB header declares an empty sequence");

  const std::uint64_t payload = 16 + 4 * n * d;
  bool has_fps = false;
  if (total_bytes == payload + 4) {
    has_fps = true;
  } else if (total_bytes != payload) {
    throw SizeMismatchError("REMB payload size " + std::to_string(total_bytes) + " does not match header (" +
                            std::to_string(n) + " x " + std::to_string(d) + ")");
  }

  FrameEmbeddingSequence seq;
  seq.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  float* p = seq.data.data();
  for (std::uint64_t i = 0; i < n * d; ++i) p[i] = binio::read_f32(in, "REMB payload");
  if (has_fps) seq.fps = binio::read_f32(in, "REMB fps");
  if (!seq.data.allFinite()) throw DataError("REMB payload contains non-finite values");
  if (seq.fps && !std::isfinite(*seq.fps)) throw DataError("REMB fps is non-finite");
  return seq;
}

inline FrameEmbeddingSequence load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + path.string());
  if (size < 16) {
    if (size < 4 || !binio::read_magic(in, "REMB")) throw FormatError("bad REMB magic in " + path.string());
    throw SizeMismatchError("truncated REMB header in " + path.string());
  }
  return read_embeddings(in, size);
}

// ---------------------------------------------------------------------------
// Annotation text format: one "start end" pair per line, '#' starts a comment.
// ---------------------------------------------------------------------------

inline SegmentAnnotation parse_annotation(std::istream& in, const std::string& source = "<annotation>") {
  SegmentAnnotation ann;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;

    auto fail = [&](const std::string& why) {
      return FormatError(source + ":" + std::to_string(line_no) + ": " + why + ": '" + line + "'");
    };
    if (toks.size() != 2) throw fail("expected 'start end'");
    Segment s;
    for (int k = 0; k < 2; ++k) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(toks[k], &used, 10);
      } catch (const std::exception&) {
        throw fail("not an integer");
      }
      if (used != toks[k].size()) throw fail("not an integer");
      (k == 0 ? s.start : s.end) = v;
    }
    if (s.start < 0 || s.end < s.start) throw fail("invalid segment bounds");
    if (!ann.segments.empty() && s.start <= ann.segments.back().end) throw fail("segments must be sorted and disjoint");
    ann.segments.push_back(s);
  }
  return ann;
}

inline SegmentAnnotation load_annotation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_annotation(in, path.string());
}

inline void write_annotation(std::ostream& out, const SegmentAnnotation& ann) {
  for (const auto& s : ann.segments) out << s.start << ' ' << s.end << '\n';
}

inline void save_annotation(const SegmentAnnotation& ann, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_annotation(out, ann);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace reactnet
