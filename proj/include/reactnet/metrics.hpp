#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"

namespace reactnet {

/// Frame-level scores with "repetitive" as the positive class.
struct EvalReport {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double overlap = 0.0;  // Jaccard index tp / (tp + fp + fn)
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Fills the four ratios from the confusion counts. Empty denominators score
/// 1 when the matching numerator side is also empty (nothing to find / nothing
/// claimed), else 0.
inline EvalReport report_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn) {
  EvalReport r{0, 0, 0, 0, tp, fp, fn, tn};
  const auto ratio = [](std::int64_t num, std::int64_t den) { return static_cast<double>(num) / static_cast<double>(den); };
  r.precision = (tp + fp == 0) ? (tp + fn == 0 ? 1.0 : 0.0) : ratio(tp, tp + fp);
  r.recall = (tp + fn == 0) ? (tp + fp == 0 ? 1.0 : 0.0) : ratio(tp, tp + fn);
  r.f1 = (r.precision + r.recall == 0.0) ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.overlap = (tp + fp + fn == 0) ? 1.0 : ratio(tp, tp + fp + fn);
  return r;
}

inline EvalReport evaluate_labels(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  if (pred.size() != truth.size())
    throw SizeMismatchError("prediction has " + std::to_string(pred.size()) + " frames, ground truth " +
                            std::to_string(truth.size()));
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const bool p = pred[f] != 0, t = truth[f] != 0;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
    tn += !p && !t;
  }
  return report_from_counts(tp, fp, fn, tn);
}

inline EvalReport evaluate(std::span<const std::uint8_t> pred, const SegmentAnnotation& gt, std::int64_t n) {
  if (static_cast<std::int64_t>(pred.size()) != n)
    throw SizeMismatchError("prediction has " + std::to_string(pred.size()) + " frames, expected " + std::to_string(n));
  const FrameLabels truth = gt.to_labels(n);
  return evaluate_labels(pred, truth);
}

/// Per-video macro average of the ratios; confusion counts are summed.
inline EvalReport aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("cannot aggregate an empty list of reports");
  EvalReport out;
  for (const auto& r : reports) {
    out.recall += r.recall;
    out.precision += r.precision;
    out.f1 += r.f1;
    out.overlap += r.overlap;
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.tn += r.tn;
  }
  const double k = static_cast<double>(reports.size());
  out.recall /= k;
  out.precision /= k;
  out.f1 /= k;
  out.overlap /= k;
  return out;
}

struct MetricSpread {
  double recall = 0.0, precision = 0.0, f1 = 0.0, overlap = 0.0;
};

/// Sample standard deviation (n - 1) of each ratio; zero for a single report.
inline MetricSpread spread(std::span<const EvalReport> reports) {
  MetricSpread s;
  if (reports.size() < 2) return s;
  const EvalReport mean = aggregate(reports);
  for (const auto& r : reports) {
    s.recall += (r.recall - mean.recall) * (r.recall - mean.recall);
    s.precision += (r.precision - mean.precision) * (r.precision - mean.precision);
    s.f1 += (r.f1 - mean.f1) * (r.f1 - mean.f1);
    s.overlap += (r.overlap - mean.overlap) * (r.overlap - mean.overlap);
  }
  const double d = static_cast<double>(reports.size() - 1);
  s.recall = std::sqrt(s.recall / d);
  s.precision = std::sqrt(s.precision / d);
  s.f1 = std::sqrt(s.f1 / d);
  s.overlap = std::sqrt(s.overlap / d);
  return s;
}

/// e.g. "R 100.0 P 50.0 F1 66.7 O 50.0"
inline std::string format_report_line(const EvalReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "R %.1f P %.1f F1 %.1f O %.1f", 100.0 * r.recall, 100.0 * r.precision, 100.0 * r.f1,
                100.0 * r.overlap);
  return buf;
}

/// Tab-separated record: videos, R, P, F1, O (percent), tp, fp, fn, tn.
inline std::string format_report_tsv(const EvalReport& r, std::size_t videos = 1) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu\t%.1f\t%.1f\t%.1f\t%.1f\t%lld\t%lld\t%lld\t%lld", videos, 100.0 * r.recall,
                100.0 * r.precision, 100.0 * r.f1, 100.0 * r.overlap, static_cast<long long>(r.tp),
                static_cast<long long>(r.fp), static_cast<long long>(r.fn), static_cast<long long>(r.tn));
  return buf;
}

}  // namespace reactnet
