#include <gtest/gtest.h>

#include "reactnet/distmat.hpp"
#include "reactnet/synthetic.hpp"

using namespace reactnet;

namespace {
SyntheticSpec plan_spec(std::vector<PlanEntry> plan, std::int64_t pmin, std::int64_t pmax, double noise, std::uint64_t seed) {
  SyntheticSpec s;
  s.dim = 8;
  s.segment_plan = std::move(plan);
  s.period_min = pmin;
  s.period_max = pmax;
  s.noise_sigma = noise;
  s.seed = seed;
  return s;
}
constexpr auto kRep = SegmentKind::kRepetitive;
constexpr auto kNon = SegmentKind::kNonRepetitive;
}  // namespace

TEST(Synthetic, PlanBookkeeping) {
  const auto [seq, ann] = generate_synthetic(plan_spec({{kNon, 50}, {kRep, 100}, {kNon, 30}}, 8, 40, 0.3, 7));
  EXPECT_EQ(seq.n_frames(), 180);
  EXPECT_EQ(seq.dim(), 8);
  ASSERT_EQ(ann.segments.size(), 1u);
  EXPECT_EQ(ann.segments[0], (Segment{50, 149}));
}

TEST(Synthetic, ZeroNoiseFramesOnePeriodApartCoincide) {
  for (std::int64_t period : {2, 7, 13, 40}) {
    const auto [seq, ann] = generate_synthetic(plan_spec({{kNon, 20}, {kRep, 120}, {kNon, 10}}, period, period, 0.0, 3));
    const auto m = build_distance_matrix(seq);
    const auto& s = ann.segments.at(0);
    for (auto t = s.start; t + period <= s.end; ++t) ASSERT_EQ(m.values(t, t + period), 0.0) << "period " << period << " t " << t;
    // but not half a period apart
    if (period >= 4) EXPECT_GT(m.values(s.start, s.start + period / 2), 0.5);
  }
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto spec = plan_spec({{kRep, 60}, {kNon, 40}, {kRep, 90}}, 8, 30, 0.3, 99);
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  auto other = spec;
  other.seed = 100;
  EXPECT_FALSE(generate_synthetic(other).first == a.first);
}

TEST(Synthetic, RepetitiveSegmentShorterThanPeriodIsRejected) {
  EXPECT_THROW(generate_synthetic(plan_spec({{kRep, 5}}, 8, 8, 0.0, 1)), SpecError);
  EXPECT_THROW(generate_synthetic(plan_spec({{kNon, 0}}, 8, 8, 0.0, 1)), SpecError);
  EXPECT_THROW(generate_synthetic(plan_spec({{kNon, 10}}, 1, 8, 0.0, 1)), SpecError);
}

TEST(Synthetic, LabelledFramesEqualRepetitivePlanIntervals) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PlanEntry> plan;
    std::vector<std::uint8_t> expected;
    const int pieces = 1 + static_cast<int>(rng() % 6);
    for (int p = 0; p < pieces; ++p) {
      const bool rep = rng() % 2;
      const std::int64_t len = rep ? 10 + static_cast<std::int64_t>(rng() % 50) : 1 + static_cast<std::int64_t>(rng() % 50);
      plan.push_back({rep ? kRep : kNon, len});
      expected.insert(expected.end(), static_cast<std::size_t>(len), rep ? 1 : 0);
    }
    // adjacent repetitive plan entries stay separate segments
    const auto [seq, ann] = generate_synthetic(plan_spec(plan, 2, 10, 0.1, static_cast<std::uint64_t>(trial)));
    EXPECT_EQ(ann.to_labels(seq.n_frames()), expected);
    std::size_t reps = 0;
    for (const auto& e : plan) reps += e.kind == kRep;
    EXPECT_EQ(ann.segments.size(), reps);
  }
}

TEST(SyntheticCorpus, SpecsRespectRanges) {
  SyntheticCorpusConfig cfg;
  cfg.videos = 25;
  cfg.seed = 11;
  const auto specs = make_corpus_specs(cfg);
  ASSERT_EQ(specs.size(), 25u);
  for (const auto& s : specs) {
    std::int64_t total = 0;
    int reps = 0;
    for (const auto& e : s.segment_plan) {
      total += e.length;
      if (e.kind == kRep) {
        ++reps;
        EXPECT_GE(e.length, cfg.min_repetitive_length());
      } else {
        EXPECT_GE(e.length, cfg.min_gap);
      }
    }
    EXPECT_GE(total, cfg.frames_min);
    EXPECT_LE(total, cfg.frames_max);
    EXPECT_GE(reps, cfg.segments_min);
    EXPECT_LE(reps, cfg.segments_max);
    EXPECT_NO_THROW(generate_synthetic(s));
  }
  EXPECT_EQ(make_corpus_specs(cfg).front().seed, specs.front().seed);
}

TEST(SyntheticCorpus, ImpossibleLayoutIsRejected) {
  SyntheticCorpusConfig cfg;
  cfg.frames_min = 100;
  cfg.frames_max = 200;
  EXPECT_THROW(make_corpus_specs(cfg), SpecError);
}
