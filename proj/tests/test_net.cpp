#include <gtest/gtest.h>

#include <sstream>

#include "reactnet/checkpoint.hpp"
#include "reactnet/gradcheck.hpp"
#include "reactnet/net.hpp"

using namespace reactnet;

namespace {
NetConfig tiny(int stages = 3) {
  NetConfig c;
  c.stages = stages;
  c.channels = 3;
  c.canonical = 16;
  c.stage_weights = default_stage_weights(stages);
  return c;
}

template <class T>
Tensor4<T> input(int n, int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor4<T> x(n, 1, side, side);
  for (auto& v : x.data) v = static_cast<T>(u(rng));
  return x;
}

template <class T>
Tensor4<T> target(int n, int side) {
  Tensor4<T> y(n, 1, side, side);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) y.at(i, 0, r, c) = (r < side / 2) == (c < side / 2) ? T(1) : T(0);
  return y;
}
}  // namespace

TEST(Net, DefaultStageWeights) {
  EXPECT_EQ(default_stage_weights(1), std::vector<double>{0.7});
  const auto w3 = default_stage_weights(3);
  ASSERT_EQ(w3.size(), 3u);
  EXPECT_NEAR(w3[0], 0.3, 1e-15);
  EXPECT_NEAR(w3[1], 0.5, 1e-15);
  EXPECT_NEAR(w3[2], 0.7, 1e-15);
  EXPECT_EQ(NetConfig{}.stage_weights, (std::vector<double>{0.3, 0.5, 0.7}));
}

TEST(Net, ConfigValidation) {
  auto c = tiny();
  c.stage_weights = {0.5};
  EXPECT_THROW(ReActNet<float>(c, 0), ConfigError);
  c = tiny();
  c.first_filter = 4;
  EXPECT_THROW(ReActNet<float>(c, 0), ConfigError);
  c = tiny();
  c.canonical = 18;
  EXPECT_THROW(ReActNet<float>(c, 0), ConfigError);
  c = tiny();
  c.stage_weights = {0.3, 1.0, 0.7};
  EXPECT_THROW(ReActNet<float>(c, 0), ConfigError);
}

TEST(Net, ShapesAndRange) {
  ReActNet<float> net(tiny(), 1);
  const auto x = input<float>(2, 16, 2);
  for (const auto& preds : {net.forward_train(x), net.predict(x)}) {
    ASSERT_EQ(preds.size(), 3u);
    for (const auto& p : preds) {
      EXPECT_EQ(p.shape_string(), "(2,1,16,16)");
      for (float v : p.data) {
        EXPECT_GT(v, 0.0f);
        EXPECT_LT(v, 1.0f);
      }
    }
  }
  EXPECT_THROW(net.predict(input<float>(1, 12, 0)), ShapeError);
}

TEST(Net, FullSizeForwardPass) {
  ReActNet<float> net(NetConfig{}, 3);
  const auto preds = net.predict(input<float>(1, 140, 4));
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_EQ(preds.back().shape_string(), "(1,1,140,140)");
}

TEST(Net, SingleStageHasOneHeadAndNoReinjection) {
  ReActNet<float> net(tiny(1), 1);
  int heads = 0, reinject = 0;
  for (auto* p : net.parameters()) {
    heads += p->name.find(".head.weight") != std::string::npos;
    reinject += p->name.find("reinject") != std::string::npos;
  }
  EXPECT_EQ(heads, 1);
  EXPECT_EQ(reinject, 0);
  EXPECT_EQ(net.predict(input<float>(1, 16, 0)).size(), 1u);
}

TEST(Net, SeedDeterminesWeights) {
  ReActNet<float> a(tiny(), 5), b(tiny(), 5), c(tiny(), 6);
  const auto x = input<float>(1, 16, 1);
  EXPECT_EQ(a.predict(x), b.predict(x));
  EXPECT_NE(a.predict(x), c.predict(x));
}

TEST(Net, PredictDoesNotTouchState) {
  ReActNet<float> net(tiny(), 5);
  const auto x = input<float>(2, 16, 1);
  const auto before = net.predict(x);
  net.predict(input<float>(2, 16, 9));
  EXPECT_EQ(net.predict(x), before);
  net.forward_train(x);  // updates running statistics
  EXPECT_NE(net.predict(x), before);
}

TEST(Net, SkipToggleChangesOutput) {
  auto with = tiny(), without = tiny();
  without.skip_connections = false;
  ReActNet<float> a(with, 5), b(without, 5);
  const auto x = input<float>(1, 16, 1);
  EXPECT_NE(a.predict(x).back(), b.predict(x).back());
}

TEST(Net, StagedLossSumsSupervisedStages) {
  const auto y = target<double>(1, 4);
  std::vector<Tensor4<double>> preds;
  for (double v : {0.2, 0.5, 0.8}) preds.emplace_back(1, 1, 4, 4, v);
  NetConfig c = tiny();
  c.canonical = 4;
  const auto full = staged_loss(preds, y, c);
  double expected = 0;
  for (int k = 0; k < 3; ++k) expected += wbce_loss(preds[k], y, c.stage_weights[k]).value;
  EXPECT_NEAR(full.total, expected, 1e-12);

  c.intermediate_supervision = false;
  const auto last = staged_loss(preds, y, c);
  EXPECT_NEAR(last.total, wbce_loss(preds[2], y, 0.7).value, 1e-12);
  EXPECT_EQ(last.per_stage.size(), 3u);
  for (double g : last.dlogits[0].data) EXPECT_EQ(g, 0.0);
}

namespace {
// Inside a whole network the ReLU and pooling inputs cannot be kept away from
// kinks, so an element that fails the central check at h = 1e-4 is accepted
// when both one-sided differences at h = 1e-7 agree with it (a kink lies within
// the wide step, the gradient itself is right). Returns the number of elements
// failing both.
int network_gradcheck(const NetConfig& cfg, std::uint64_t seed, int* kinked = nullptr) {
  ReActNet<double> net(cfg, seed);
  const auto x = input<double>(2, cfg.canonical, seed + 1);
  const auto y = target<double>(2, cfg.canonical);
  auto loss = [&] { return staged_loss(net.forward_train(x), y, cfg).total; };
  net.zero_grad();
  net.backward(staged_loss(net.forward_train(x), y, cfg).dlogits);
  int bad = 0, near_kink = 0;
  for (auto* p : net.parameters()) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value.data[i];
      auto at = [&](double d) {
        p->value.data[i] = saved + d;
        const double v = loss();
        p->value.data[i] = saved;
        return v;
      };
      const double a = p->grad.data[i];
      if (relative_error(a, (at(1e-4) - at(-1e-4)) / 2e-4) <= 1e-4) continue;
      const double l0 = at(0.0);
      const double right = (at(1e-7) - l0) / 1e-7, left = (l0 - at(-1e-7)) / 1e-7;
      if (relative_error(a, right) <= 1e-4 && relative_error(a, left) <= 1e-4)
        ++near_kink;
      else
        ++bad;
    }
  }
  if (kinked) *kinked = near_kink;
  return bad;
}
}  // namespace

TEST(Net, EndToEndGradientMatchesFiniteDifferences) {
  NetConfig c;
  c.stages = 2;
  c.channels = 2;
  c.first_filter = 3;
  c.canonical = 8;
  c.stage_weights = {0.4, 0.7};
  int kinked = 0;
  EXPECT_EQ(network_gradcheck(c, 21, &kinked), 0);
  EXPECT_LE(kinked, 20);
  c.skip_connections = false;
  c.intermediate_supervision = false;
  c.upsampling = ops::Upsampling::kBilinear;
  EXPECT_EQ(network_gradcheck(c, 22, &kinked), 0);
  EXPECT_LE(kinked, 20);
}

TEST(Checkpoint, RoundTripIsExact) {
  ReActNet<float> net(tiny(), 8);
  net.forward_train(input<float>(2, 16, 3));
  std::stringstream buf;
  write_checkpoint(buf, net);
  auto back = read_checkpoint(buf);
  EXPECT_EQ(back.config(), net.config());
  const auto a = net.state_tensors(), b = back.state_tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value, b[i]->value);
  }
  const auto x = input<float>(1, 16, 4);
  EXPECT_EQ(net.predict(x), back.predict(x));
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  ReActNet<float> net(tiny(1), 8);
  std::stringstream buf;
  write_checkpoint(buf, net);
  const std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), SizeMismatchError);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(read_checkpoint(trailing), SizeMismatchError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream magic(bad);
  EXPECT_THROW(read_checkpoint(magic), FormatError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.ranw"), IoError);
}
