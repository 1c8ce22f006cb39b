#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"

namespace reactnet {

enum class SegmentKind { kRepetitive, kNonRepetitive };

struct PlanEntry {
  SegmentKind kind = SegmentKind::kNonRepetitive;
  std::int64_t length = 1;
};

/// Recipe for one synthetic video.
struct SyntheticSpec {
  std::int64_t dim = 16;
  std::vector<PlanEntry> segment_plan;
  std::int64_t period_min = 8;
  std::int64_t period_max = 40;
  double amplitude = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1) throw SpecError("synthetic dim must be >= 1");
    if (segment_plan.empty()) throw SpecError("synthetic segment plan is empty");
    if (period_min < 2 || period_max < period_min) throw SpecError("period range must satisfy 2 <= min <= max");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw SpecError("amplitude must be positive");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw SpecError("noise_sigma must be >= 0");
    for (const auto& e : segment_plan)
      if (e.length < 1) throw SpecError("plan lengths must be >= 1");
  }
};

namespace synth_detail {
// Per-dimension std of the per-segment offset, in units of amplitude.
inline constexpr double kOffsetScale = 2.0;
// Per-dimension std of one random-walk step, in units of amplitude.
inline constexpr double kWalkStep = 0.25;
inline constexpr int kWalkSmoothWidth = 5;
}  // namespace synth_detail

/// Builds one synthetic embedding sequence and its ground-truth annotation.
/// Repetitive segments trace a noisy circle of random period in the first two
/// coordinates around a per-segment offset; the rest is a smoothed random walk.
inline std::pair<FrameEmbeddingSequence, SegmentAnnotation> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  using namespace synth_detail;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> period_dist(spec.period_min, spec.period_max);

  std::int64_t total = 0;
  for (const auto& e : spec.segment_plan) total += e.length;

  FrameEmbeddingSequence seq;
  seq.data.resize(total, spec.dim);
  SegmentAnnotation ann;
  const double amp = spec.amplitude;

  std::int64_t cursor = 0;
  for (const auto& entry : spec.segment_plan) {
    const std::int64_t len = entry.length;
    std::vector<double> offset(static_cast<std::size_t>(spec.dim));
    for (auto& c : offset) c = kOffsetScale * amp * gauss(rng);

    Eigen::MatrixXd block(len, spec.dim);
    if (entry.kind == SegmentKind::kRepetitive) {
      const std::int64_t period = period_dist(rng);
      if (len < period)
        throw SpecError("repetitive segment of length " + std::to_string(len) + " shorter than its period " +
                        std::to_string(period));
      const double phase = 2.0 * std::numbers::pi * unit(rng);
      for (std::int64_t t = 0; t < len; ++t) {
        // reduce t modulo the period first so frames one period apart are bit-identical
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(t % period) / static_cast<double>(period) + phase;
        for (std::int64_t d = 0; d < spec.dim; ++d) block(t, d) = offset[static_cast<std::size_t>(d)];
        block(t, 0) += amp * std::sin(angle);
        if (spec.dim > 1) block(t, 1) += amp * std::cos(angle);
      }
      ann.segments.push_back({cursor, cursor + len - 1});
    } else {
      Eigen::MatrixXd walk(len, spec.dim);
      for (std::int64_t d = 0; d < spec.dim; ++d) {
        double pos = 0.0;
        for (std::int64_t t = 0; t < len; ++t) {
          pos += kWalkStep * amp * gauss(rng);
          walk(t, d) = pos;
        }
      }
      const int half = kWalkSmoothWidth / 2;
      for (std::int64_t t = 0; t < len; ++t) {
        const std::int64_t lo = std::max<std::int64_t>(0, t - half);
        const std::int64_t hi = std::min<std::int64_t>(len - 1, t + half);
        for (std::int64_t d = 0; d < spec.dim; ++d)
          block(t, d) = offset[static_cast<std::size_t>(d)] + walk.col(d).segment(lo, hi - lo + 1).mean();
      }
    }
    for (std::int64_t t = 0; t < len; ++t)
      for (std::int64_t d = 0; d < spec.dim; ++d) {
        const double v = block(t, d) + spec.noise_sigma * gauss(rng);
        seq.data(cursor + t, d) = static_cast<float>(v);
      }
    cursor += len;
  }
  return {std::move(seq), std::move(ann)};
}

/// Ranges for drawing a corpus of randomly laid-out synthetic videos.
struct SyntheticCorpusConfig {
  int videos = 1;
  std::int64_t dim = 16;
  std::int64_t frames_min = 600;
  std::int64_t frames_max = 1200;
  int segments_min = 2;  // repetitive segments per video
  int segments_max = 4;
  std::int64_t period_min = 8;
  std::int64_t period_max = 40;
  double amplitude = 1.0;
  double noise_sigma = 0.3;
  std::int64_t min_gap = 30;  // shortest non-repetitive stretch
  std::uint64_t seed = 0;

  std::int64_t min_repetitive_length() const { return 2 * period_max; }

  void validate() const {
    if (videos < 1) throw SpecError("videos must be >= 1");
    if (frames_min < 1 || frames_max < frames_min) throw SpecError("frame range must satisfy 1 <= min <= max");
    if (segments_min < 0 || segments_max < segments_min) throw SpecError("segment range must satisfy 0 <= min <= max");
    if (min_gap < 1) throw SpecError("min_gap must be >= 1");
    const std::int64_t need = segments_max * min_repetitive_length() + (segments_max + 1) * min_gap;
    if (need > frames_min)
      throw SpecError("frames_min " + std::to_string(frames_min) + " too small for " + std::to_string(segments_max) +
                      " repetitive segments (needs " + std::to_string(need) + ")");
  }
};

/// Draws one SyntheticSpec per video: alternating filler / repetitive segments,
/// always starting and ending with filler, lengths split at random.
inline std::vector<SyntheticSpec> make_corpus_specs(const SyntheticCorpusConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::int64_t> frames_dist(cfg.frames_min, cfg.frames_max);
  std::uniform_int_distribution<int> seg_dist(cfg.segments_min, cfg.segments_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SyntheticSpec> specs;
  specs.reserve(static_cast<std::size_t>(cfg.videos));
  for (int v = 0; v < cfg.videos; ++v) {
    const std::int64_t total = frames_dist(rng);
    const int reps = seg_dist(rng);
    const int pieces = 2 * reps + 1;

    std::vector<std::int64_t> lengths(static_cast<std::size_t>(pieces));
    std::int64_t used = 0;
    for (int p = 0; p < pieces; ++p) {
      lengths[static_cast<std::size_t>(p)] = (p % 2 == 1) ? cfg.min_repetitive_length() : cfg.min_gap;
      used += lengths[static_cast<std::size_t>(p)];
    }
    // split the slack proportionally to uniform random weights
    std::vector<double> weights(static_cast<std::size_t>(pieces));
    double wsum = 0.0;
    for (auto& w : weights) wsum += (w = unit(rng) + 1e-3);
    std::int64_t slack = total - used;
    std::int64_t given = 0;
    for (int p = 0; p < pieces; ++p) {
      const auto extra = static_cast<std::int64_t>(std::floor(static_cast<double>(slack) * weights[static_cast<std::size_t>(p)] / wsum));
      lengths[static_cast<std::size_t>(p)] += extra;
      given += extra;
    }
    lengths.back() += slack - given;

    SyntheticSpec spec;
    spec.dim = cfg.dim;
    spec.period_min = cfg.period_min;
    spec.period_max = cfg.period_max;
    spec.amplitude = cfg.amplitude;
    spec.noise_sigma = cfg.noise_sigma;
    spec.seed = rng();
    for (int p = 0; p < pieces; ++p)
      spec.segment_plan.push_back({p % 2 == 1 ? SegmentKind::kRepetitive : SegmentKind::kNonRepetitive,
                                   lengths[static_cast<std::size_t>(p)]});
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace reactnet
