#include <gtest/gtest.h>

#include <random>
#include <set>

#include "reactnet/metrics.hpp"

using namespace reactnet;

TEST(Metrics, HalfCorrectPrediction) {
  const FrameLabels pred{1, 1, 1, 1, 0, 0};
  const auto r = evaluate(pred, SegmentAnnotation{{{0, 1}}}, 6);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp, 2);
  EXPECT_EQ(r.fn, 0);
  EXPECT_EQ(r.tn, 2);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.overlap, 0.5);
  EXPECT_EQ(format_report_line(r), "R 100.0 P 50.0 F1 66.7 O 50.0");
}

TEST(Metrics, PerfectAndDegenerateCases) {
  const auto perfect = evaluate(FrameLabels{0, 1, 1, 0}, SegmentAnnotation{{{1, 2}}}, 4);
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(perfect.overlap, 1.0);

  const auto nothing = evaluate(FrameLabels{0, 0, 0}, SegmentAnnotation{}, 3);
  EXPECT_EQ(nothing.precision, 1.0);
  EXPECT_EQ(nothing.recall, 1.0);
  EXPECT_EQ(nothing.f1, 1.0);
  EXPECT_EQ(nothing.overlap, 1.0);

  const auto missed = evaluate(FrameLabels{0, 0, 0}, SegmentAnnotation{{{0, 0}}}, 3);
  EXPECT_EQ(missed.precision, 0.0);
  EXPECT_EQ(missed.recall, 0.0);
  EXPECT_EQ(missed.f1, 0.0);
  EXPECT_EQ(missed.overlap, 0.0);

  const auto spurious = evaluate(FrameLabels{1, 0, 0}, SegmentAnnotation{}, 3);
  EXPECT_EQ(spurious.precision, 0.0);
  EXPECT_EQ(spurious.recall, 0.0);
  EXPECT_EQ(spurious.overlap, 0.0);
}

TEST(Metrics, LengthMismatch) {
  EXPECT_THROW(evaluate(FrameLabels{0, 1}, SegmentAnnotation{}, 3), SizeMismatchError);
  EXPECT_THROW(evaluate_labels(FrameLabels{0, 1}, FrameLabels{0}), SizeMismatchError);
}

TEST(Metrics, MatchesSetOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    FrameLabels p(1000), t(1000);
    for (std::size_t f = 0; f < 1000; ++f) {
      p[f] = rng() % 2;
      t[f] = rng() % 3 == 0;
    }
    std::set<std::size_t> ps, ts, inter, uni;
    for (std::size_t f = 0; f < 1000; ++f) {
      if (p[f]) ps.insert(f);
      if (t[f]) ts.insert(f);
      if (p[f] && t[f]) inter.insert(f);
      if (p[f] || t[f]) uni.insert(f);
    }
    const auto r = evaluate_labels(p, t);
    const double prec = double(inter.size()) / ps.size(), rec = double(inter.size()) / ts.size();
    EXPECT_NEAR(r.precision, prec, 1e-12);
    EXPECT_NEAR(r.recall, rec, 1e-12);
    EXPECT_NEAR(r.f1, 2 * prec * rec / (prec + rec), 1e-12);
    EXPECT_NEAR(r.overlap, double(inter.size()) / uni.size(), 1e-12);
    // Jaccard and Dice determine each other
    EXPECT_NEAR(r.f1, 2 * r.overlap / (1 + r.overlap), 1e-12);
    EXPECT_LE(r.overlap, r.f1 + 1e-15);
  }
}

TEST(Metrics, MacroAverageAndSpread) {
  const std::vector<EvalReport> rs{report_from_counts(1, 1, 0, 2), report_from_counts(2, 0, 0, 2)};
  const auto a = aggregate(rs);
  EXPECT_DOUBLE_EQ(a.precision, 0.75);
  EXPECT_DOUBLE_EQ(a.recall, 1.0);
  EXPECT_EQ(a.tp, 3);
  EXPECT_EQ(a.tn, 4);
  const auto s = spread(rs);
  EXPECT_NEAR(s.precision, std::sqrt(0.125), 1e-15);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(spread(std::span(rs).first(1)).f1, 0.0);
  EXPECT_THROW(aggregate({}), DataError);
}

TEST(Metrics, TsvFormat) {
  EXPECT_EQ(format_report_tsv(report_from_counts(2, 2, 0, 2), 3), "3\t100.0\t50.0\t66.7\t50.0\t2\t2\t0\t2");
}
