#include <gtest/gtest.h>

#include <sstream>

#include "reactnet/inference.hpp"
#include "test_util.hpp"

using namespace reactnet;

TEST(Windows, StartsCoverTheDiagonal) {
  EXPECT_EQ(window_starts(300, 140, 35), (std::vector<Eigen::Index>{0, 35, 70, 105, 140, 160}));
  EXPECT_EQ(window_starts(140, 140, 35), std::vector<Eigen::Index>{0});
  EXPECT_EQ(window_starts(90, 140, 35), std::vector<Eigen::Index>{0});
  EXPECT_EQ(window_starts(175, 140, 35), (std::vector<Eigen::Index>{0, 35}));
}

TEST(Aggregate, AveragesOverlappingWindows) {
  std::vector<WindowPrediction> w{{0, 3, {0.2, 0.4, 0.6}}, {1, 3, {0.8, 0.6, 0.4}}};
  const auto s = aggregate_frame_scores(4, w, 0.5);
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{1, 2, 2, 1}));
  EXPECT_NEAR(s.mean[0], 0.2, 1e-15);
  EXPECT_NEAR(s.mean[1], 0.6, 1e-15);
  EXPECT_NEAR(s.mean[2], 0.6, 1e-15);
  EXPECT_NEAR(s.mean[3], 0.4, 1e-15);
  EXPECT_EQ(s.labels, (FrameLabels{0, 1, 1, 0}));
}

TEST(Aggregate, ScoreEqualToThresholdIsNotRepetitive) {
  std::vector<WindowPrediction> w{{0, 2, {0.5, 0.75}}};
  EXPECT_EQ(aggregate_frame_scores(2, w, 0.5).labels, (FrameLabels{0, 1}));
  EXPECT_EQ(aggregate_frame_scores(2, w, 0.75).labels, (FrameLabels{0, 0}));
}

TEST(Aggregate, UncoveredFrameIsAnError) {
  std::vector<WindowPrediction> w{{0, 2, {0.5, 0.5}}};
  EXPECT_THROW(aggregate_frame_scores(3, w, 0.5), BoundsError);
  std::vector<WindowPrediction> outside{{2, 2, {0.5, 0.5}}};
  EXPECT_THROW(aggregate_frame_scores(3, outside, 0.5), BoundsError);
}

namespace {
// Passes the normalised block through, so predictions are a known function of the input.
auto identity_predictor() {
  return [](const Eigen::MatrixXd& b) { return Eigen::MatrixXd(b); };
}
}  // namespace

TEST(PredictWindows, EveryFrameCovered) {
  InferConfig cfg;
  for (Eigen::Index n : {2, 7, 139, 140, 141, 300, 401}) {
    const auto m = build_distance_matrix(reactnet::testing::random_sequence(n, 4, static_cast<std::uint64_t>(n)));
    const auto windows = predict_windows(identity_predictor(), 28, cfg, m);
    const auto s = aggregate_frame_scores(n, windows, cfg.threshold);
    for (auto c : s.counts) EXPECT_GE(c, 1);
    for (double p : s.mean) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(PredictWindows, MatchesBruteForce) {
  const Eigen::Index n = 230, canonical = 20;
  InferConfig cfg;
  cfg.window = 100;
  cfg.stride = 40;
  const auto m = build_distance_matrix(reactnet::testing::random_sequence(n, 5, 31));
  const auto got = aggregate_frame_scores(n, predict_windows(identity_predictor(), canonical, cfg, m), cfg.threshold);

  std::vector<double> sum(n, 0.0), count(n, 0.0);
  for (Eigen::Index s : {0, 40, 80, 120, 130}) {
    const Eigen::MatrixXd crop = m.values.block(s, s, 100, 100);
    const Eigen::MatrixXd small = normalize_minmax(lanczos_resize(crop, canonical));
    const Eigen::MatrixXd back = lanczos_resize(small, 100);
    for (Eigen::Index i = 0; i < 100; ++i) {
      sum[s + i] += std::clamp(back(i, i), 0.0, 1.0);
      count[s + i] += 1;
    }
  }
  for (Eigen::Index f = 0; f < n; ++f) {
    EXPECT_EQ(got.counts[f], static_cast<std::int64_t>(count[f]));
    EXPECT_NEAR(got.mean[f], sum[f] / count[f], 1e-12) << f;
  }
}

TEST(PredictWindows, RowMeanRule) {
  InferConfig cfg;
  cfg.rule = FrameScoreRule::kRowMean;
  const auto m = build_distance_matrix(reactnet::testing::random_sequence(50, 3, 2));
  auto half = [](const Eigen::MatrixXd& b) { return Eigen::MatrixXd::Constant(b.rows(), b.cols(), 0.25); };
  const auto s = aggregate_frame_scores(50, predict_windows(half, 12, cfg, m), cfg.threshold);
  for (double p : s.mean) EXPECT_NEAR(p, 0.25, 1e-12);
}

TEST(PredictWindows, RaisingThresholdNeverAddsPositives) {
  const auto m = build_distance_matrix(reactnet::testing::random_sequence(260, 4, 5));
  InferConfig cfg;
  const auto windows = predict_windows(identity_predictor(), 28, cfg, m);
  FrameLabels prev(260, 1);
  for (double t = 0.05; t < 1.0; t += 0.05) {
    const auto labels = aggregate_frame_scores(260, windows, t).labels;
    for (std::size_t f = 0; f < labels.size(); ++f) EXPECT_LE(labels[f], prev[f]);
    prev = labels;
  }
}

TEST(PredictWindows, Errors) {
  InferConfig cfg;
  const auto one = build_distance_matrix(reactnet::testing::random_sequence(1, 3, 1));
  EXPECT_THROW(predict_windows(identity_predictor(), 12, cfg, one), ShapeError);
  cfg.stride = 0;
  const auto m = build_distance_matrix(reactnet::testing::random_sequence(20, 3, 1));
  EXPECT_THROW(predict_windows(identity_predictor(), 12, cfg, m), ConfigError);
  cfg = InferConfig{};
  cfg.threshold = 1.0;
  EXPECT_THROW(predict_windows(identity_predictor(), 12, cfg, m), ConfigError);
}

TEST(PredictFrames, UsesNetworkAndChecksCanonical) {
  NetConfig nc;
  nc.stages = 1;
  nc.channels = 2;
  nc.canonical = 16;
  nc.stage_weights = {0.7};
  ReActNet<float> net(nc, 1);
  const auto m = build_distance_matrix(reactnet::testing::random_sequence(60, 3, 1));
  InferConfig cfg;
  const auto s = predict_frames(net, cfg, m);
  EXPECT_EQ(s.n(), 60u);
  cfg.canonical = 140;
  EXPECT_THROW(predict_frames(net, cfg, m), ConfigError);
}

TEST(Segments, ExtractRuns) {
  const FrameLabels l{0, 1, 1, 0, 1, 1, 1, 0, 1};
  EXPECT_EQ(extract_segments(l).segments, (std::vector<Segment>{{1, 2}, {4, 6}, {8, 8}}));
  EXPECT_EQ(extract_segments(l, 3).segments, (std::vector<Segment>{{4, 6}}));
  EXPECT_TRUE(extract_segments(FrameLabels(5, 0)).segments.empty());
  EXPECT_EQ(extract_segments(FrameLabels(5, 1)).segments, (std::vector<Segment>{{0, 4}}));
}

TEST(Segments, RoundTripThroughLabels) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    FrameLabels l(100);
    for (auto& v : l) v = rng() % 3 == 0;
    EXPECT_EQ(extract_segments(l).to_labels(100), l);
  }
}

TEST(ScoreFile, RoundTrip) {
  FrameScores s;
  s.mean = {0.1234567, 0.9, 0.5};
  s.counts = {1, 1, 1};
  s.labels = {0, 1, 0};
  std::stringstream buf;
  write_scores(buf, s);
  EXPECT_EQ(buf.str(), "0 0.123457 0\n1 0.900000 1\n2 0.500000 0\n");
  const auto back = parse_scores(buf);
  EXPECT_EQ(back.labels, s.labels);
  EXPECT_NEAR(back.mean[0], 0.123457, 1e-12);
}

TEST(ScoreFile, MalformedLineReportsLocation) {
  std::stringstream bad("0 0.5 0\n1 oops 1\n");
  try {
    parse_scores(bad, "s.txt");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("s.txt:2"), std::string::npos);
  }
  std::stringstream gap("0 0.5 0\n2 0.5 0\n");
  EXPECT_THROW(parse_scores(gap), FormatError);
}
