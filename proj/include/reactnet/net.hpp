#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "reactnet/error.hpp"
#include "reactnet/loss.hpp"
#include "reactnet/ops.hpp"
#include "reactnet/tensor.hpp"

namespace reactnet {

/// Stage weights when none are given: the last stage gets 0.7 and earlier
/// stages are spaced evenly upward from 0.3.
inline std::vector<double> default_stage_weights(int stages) {
  if (stages <= 1) return {0.7};
  std::vector<double> w(static_cast<std::size_t>(stages));
  for (int k = 0; k < stages; ++k) w[static_cast<std::size_t>(k)] = 0.3 + 0.4 * k / (stages - 1);
  return w;
}

struct NetConfig {
  int stages = 3;
  int first_filter = 5;
  int channels = 16;
  bool skip_connections = true;
  bool intermediate_supervision = true;
  std::vector<double> stage_weights = {0.3, 0.5, 0.7};
  int canonical = 140;
  ops::Upsampling upsampling = ops::Upsampling::kNearest;

  void validate() const {
    if (stages < 1) throw ConfigError("stages must be >= 1");
    if (first_filter < 1 || first_filter % 2 == 0) throw ConfigError("first_filter must be a positive odd size");
    if (channels < 1) throw ConfigError("channels must be >= 1");
    if (canonical < 4 || canonical % 4 != 0) throw ConfigError("canonical size must be a positive multiple of 4");
    if (stage_weights.size() != static_cast<std::size_t>(stages))
      throw ConfigError("expected " + std::to_string(stages) + " stage weights, got " + std::to_string(stage_weights.size()));
    for (double w : stage_weights)
      if (!(w > 0.0 && w < 1.0)) throw ConfigError("stage weights must lie in (0, 1)");
  }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

namespace net_detail {

template <class T, class Rng>
Param<T> he_uniform(std::string name, int out_c, int in_c, int k, Rng& rng) {
  Tensor4<T> w(out_c, in_c, k, k);
  const double limit = std::sqrt(6.0 / (static_cast<double>(in_c) * k * k));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& v : w.data) v = static_cast<T>(dist(rng));
  return Param<T>(std::move(name), std::move(w));
}

template <class T>
Param<T> filled(std::string name, int len, T value) {
  return Param<T>(std::move(name), Tensor4<T>(len, 1, 1, 1, value));
}

template <class T>
struct Conv {
  Param<T> weight, bias;
  Tensor4<T> input;  // cached in training

  Conv() = default;
  template <class Rng>
  Conv(const std::string& name, int in_c, int out_c, int k, Rng& rng)
      : weight(he_uniform<T>(name + ".weight", out_c, in_c, k, rng)), bias(filled<T>(name + ".bias", out_c, T(0))) {}

  template <class Self>
  static Tensor4<T> forward(Self& self, const Tensor4<T>& x) {
    if constexpr (!std::is_const_v<Self>) self.input = x;
    return ops::conv2d_forward(x, self.weight.value, self.bias.value, ops::Padding::kSame);
  }
  Tensor4<T> backward(const Tensor4<T>& dy, bool need_dx = true) {
    return ops::conv2d_backward(input, weight.value, dy, ops::Padding::kSame, weight.grad, bias.grad, need_dx);
  }
  void collect(std::vector<Param<T>*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

// conv -> ReLU -> batch norm, optionally adding a second term before the ReLU.
template <class T>
struct ConvBlock {
  Conv<T> conv;
  Param<T> gamma, beta, running_mean, running_var;
  Tensor4<T> relu_out;
  ops::BatchNormCache<T> bn_cache;

  ConvBlock() = default;
  template <class Rng>
  ConvBlock(const std::string& name, int in_c, int out_c, int k, Rng& rng)
      : conv(name + ".conv", in_c, out_c, k, rng),
        gamma(filled<T>(name + ".bn.gamma", out_c, T(1))),
        beta(filled<T>(name + ".bn.beta", out_c, T(0))),
        running_mean(filled<T>(name + ".bn.running_mean", out_c, T(0))),
        running_var(filled<T>(name + ".bn.running_var", out_c, T(1))) {}

  template <class Self>
  static Tensor4<T> forward(Self& self, const Tensor4<T>& x, const Tensor4<T>* addend = nullptr) {
    Tensor4<T> z = Conv<T>::forward(self.conv, x);
    if (addend) ops::add_inplace(z, *addend);
    Tensor4<T> a = ops::relu_forward(z);
    if constexpr (std::is_const_v<Self>) {
      return ops::batchnorm_eval(a, self.gamma.value, self.beta.value, self.running_mean.value, self.running_var.value);
    } else {
      Tensor4<T> y = ops::batchnorm_train(a, self.gamma.value, self.beta.value, self.running_mean.value,
                                          self.running_var.value, &self.bn_cache);
      self.relu_out = std::move(a);
      return y;
    }
  }

  // Returns the gradient w.r.t. the block input; `dz` receives the gradient at
  // the pre-activation sum (i.e. w.r.t. the addend).
  Tensor4<T> backward(const Tensor4<T>& dy, Tensor4<T>* dz = nullptr, bool need_dx = true) {
    Tensor4<T> da = ops::batchnorm_backward(bn_cache, gamma.value, dy, gamma.grad, beta.grad);
    Tensor4<T> g = ops::relu_backward(relu_out, da);
    Tensor4<T> dx = conv.backward(g, need_dx);
    if (dz) *dz = std::move(g);
    return dx;
  }
  void collect(std::vector<Param<T>*>& out) {
    conv.collect(out);
    out.push_back(&gamma);
    out.push_back(&beta);
  }
  void collect_state(std::vector<Param<T>*>& out) {
    collect(out);
    out.push_back(&running_mean);
    out.push_back(&running_var);
  }
};

}  // namespace net_detail

/// One encoder/decoder hourglass with its 1x1 sigmoid prediction head.
///
///   encoder: conv(first) conv | pool | conv conv (+identity) | pool      -> 1/4 size
///   decoder: up | conv conv (+identity) | up | conv conv | head            -> full size
///
/// Stages after the first add a 1x1 projection of the previous prediction to
/// the output of their first convolution.
template <class T>
struct Stage {
  using Block = net_detail::ConvBlock<T>;
  std::vector<Block> blocks;  // 8: four encoder, four decoder
  net_detail::Conv<T> head;
  net_detail::Conv<T> reinject;
  bool has_reinject = false;

  struct Cache {
    std::vector<std::uint32_t> argmax1, argmax2;
    int h1 = 0, w1 = 0, h2 = 0, w2 = 0;
    Tensor4<T> pred;
  } cache;

  Stage() = default;
  template <class Rng>
  Stage(const NetConfig& cfg, int index, Rng& rng) {
    const std::string p = "stage" + std::to_string(index);
    const int c = cfg.channels;
    blocks.emplace_back(p + ".enc1", 1, c, cfg.first_filter, rng);
    for (int b = 2; b <= 4; ++b) blocks.emplace_back(p + ".enc" + std::to_string(b), c, c, 3, rng);
    for (int b = 1; b <= 4; ++b) blocks.emplace_back(p + ".dec" + std::to_string(b), c, c, 3, rng);
    head = net_detail::Conv<T>(p + ".head", c, 1, 1, rng);
    if (index > 0) {
      reinject = net_detail::Conv<T>(p + ".reinject", 1, c, 1, rng);
      has_reinject = true;
    }
  }

  /// Returns the stage's probability map. `prev` is the previous stage's
  /// prediction (required iff this stage has a re-injection projection).
  template <class Self>
  static Tensor4<T> forward(Self& self, const Tensor4<T>& x, const Tensor4<T>* prev, bool skip, ops::Upsampling up) {
    constexpr bool kTrain = !std::is_const_v<Self>;
    using net_detail::Conv;
    auto& bl = self.blocks;

    Tensor4<T> projected;
    if (self.has_reinject) {
      if (!prev) throw ShapeError("stage needs the previous prediction");
      projected = Conv<T>::forward(self.reinject, *prev);
    }
    Tensor4<T> h = Block::forward(bl[0], x, self.has_reinject ? &projected : nullptr);
    h = Block::forward(bl[1], h);

    std::vector<std::uint32_t>* am1 = nullptr;
    std::vector<std::uint32_t>* am2 = nullptr;
    if constexpr (kTrain) {
      am1 = &self.cache.argmax1;
      am2 = &self.cache.argmax2;
      self.cache.h1 = h.h;
      self.cache.w1 = h.w;
    }
    Tensor4<T> p1 = ops::maxpool2_forward(h, am1);
    h = Block::forward(bl[2], p1);
    h = Block::forward(bl[3], h);
    if (skip) ops::add_inplace(h, p1);
    if constexpr (kTrain) {
      self.cache.h2 = h.h;
      self.cache.w2 = h.w;
    }
    Tensor4<T> p2 = ops::maxpool2_forward(h, am2);

    Tensor4<T> u1 = ops::upsample_forward(p2, 2, up);
    h = Block::forward(bl[4], u1);
    h = Block::forward(bl[5], h);
    if (skip) ops::add_inplace(h, u1);
    Tensor4<T> u2 = ops::upsample_forward(h, 2, up);
    h = Block::forward(bl[6], u2);
    h = Block::forward(bl[7], h);

    Tensor4<T> pred = ops::sigmoid_forward(Conv<T>::forward(self.head, h));
    if constexpr (kTrain) self.cache.pred = pred;
    return pred;
  }

  /// Backpropagates d(loss)/d(logits); returns the gradient w.r.t. the previous
  /// stage's prediction (empty for the first stage).
  Tensor4<T> backward(const Tensor4<T>& dlogits, bool skip, ops::Upsampling up) {
    auto& bl = blocks;
    Tensor4<T> g = head.backward(dlogits);
    g = bl[7].backward(g);
    g = bl[6].backward(g);
    Tensor4<T> ds2 = ops::upsample_backward(g, 2, up);
    g = bl[5].backward(ds2);
    g = bl[4].backward(g);
    if (skip) ops::add_inplace(g, ds2);
    Tensor4<T> ds1 = ops::maxpool2_backward(cache.argmax2, ops::upsample_backward(g, 2, up), cache.h2, cache.w2);
    g = bl[3].backward(ds1);
    g = bl[2].backward(g);
    if (skip) ops::add_inplace(g, ds1);
    g = ops::maxpool2_backward(cache.argmax1, g, cache.h1, cache.w1);
    g = bl[1].backward(g);
    Tensor4<T> dz;
    bl[0].backward(g, &dz, /*need_dx=*/false);
    if (!has_reinject) return {};
    return reinject.backward(dz);
  }

  void collect(std::vector<Param<T>*>& out, bool with_state) {
    for (auto& b : blocks) with_state ? b.collect_state(out) : b.collect(out);
    head.collect(out);
    if (has_reinject) reinject.collect(out);
  }
};

/// The stacked hourglass classifier, mapping a normalised distance block to a
/// per-pixel probability of "same repetitive segment".
template <class T>
class ReActNet {
 public:
  ReActNet() = default;
  ReActNet(const NetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    for (int k = 0; k < cfg_.stages; ++k) stages_.emplace_back(cfg_, k, rng);
  }

  const NetConfig& config() const { return cfg_; }

  /// Learnable tensors in declaration order.
  std::vector<Param<T>*> parameters() {
    std::vector<Param<T>*> out;
    for (auto& s : stages_) s.collect(out, false);
    return out;
  }

  /// Learnable tensors plus batch-norm running statistics, in declaration order.
  std::vector<Param<T>*> state_tensors() {
    std::vector<Param<T>*> out;
    for (auto& s : stages_) s.collect(out, true);
    return out;
  }

  void zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
  }

  /// Training-mode forward pass (batch statistics, caches kept for backward).
  std::vector<Tensor4<T>> forward_train(const Tensor4<T>& x) { return run(*this, x); }

  /// Inference forward pass using running statistics; does not touch the model.
  std::vector<Tensor4<T>> predict(const Tensor4<T>& x) const { return run(*this, x); }

  /// Accumulates parameter gradients from per-stage logit gradients of the
  /// last forward_train call.
  void backward(const std::vector<Tensor4<T>>& dlogits) {
    if (dlogits.size() != stages_.size()) throw ShapeError("backward needs one logit gradient per stage");
    Tensor4<T> carry;
    for (int k = static_cast<int>(stages_.size()) - 1; k >= 0; --k) {
      Tensor4<T> d = dlogits[static_cast<std::size_t>(k)];
      if (!carry.data.empty()) ops::add_inplace(d, ops::sigmoid_backward(stages_[static_cast<std::size_t>(k)].cache.pred, carry));
      carry = stages_[static_cast<std::size_t>(k)].backward(d, cfg_.skip_connections, cfg_.upsampling);
    }
  }

 private:
  template <class Self>
  static std::vector<Tensor4<T>> run(Self& self, const Tensor4<T>& x) {
    if (x.c != 1 || x.h != self.cfg_.canonical || x.w != self.cfg_.canonical)
      throw ShapeError("network input " + x.shape_string() + " does not match canonical size " +
                       std::to_string(self.cfg_.canonical));
    std::vector<Tensor4<T>> preds;
    for (auto& s : self.stages_)
      preds.push_back(Stage<T>::forward(s, x, preds.empty() ? nullptr : &preds.back(), self.cfg_.skip_connections,
                                        self.cfg_.upsampling));
    return preds;
  }

  NetConfig cfg_;
  std::vector<Stage<T>> stages_;
};

template <class T>
ReActNet<T> build_model(const NetConfig& cfg, std::uint64_t seed) {
  return ReActNet<T>(cfg, seed);
}

template <class T>
struct StagedLoss {
  double total = 0.0;
  std::vector<double> per_stage;   // WBCE of every stage, supervised or not
  std::vector<Tensor4<T>> dlogits; // zero for unsupervised stages
};

/// Sum of per-stage WBCE terms against the same target; without intermediate
/// supervision only the final stage contributes, weighted by the last stage weight.
template <class T>
StagedLoss<T> staged_loss(const std::vector<Tensor4<T>>& preds, const Tensor4<T>& target, const NetConfig& cfg) {
  if (preds.size() != static_cast<std::size_t>(cfg.stages)) throw ShapeError("expected one prediction per stage");
  StagedLoss<T> out;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    require_same_shape(preds[k], target, "staged_loss");
    const bool supervised = cfg.intermediate_supervision || k + 1 == preds.size();
    const double w = cfg.stage_weights[supervised && !cfg.intermediate_supervision ? cfg.stage_weights.size() - 1 : k];
    auto r = wbce_loss(preds[k], target, w);
    out.per_stage.push_back(r.value);
    if (supervised) {
      out.total += r.value;
      out.dlogits.push_back(std::move(r.grad_logits));
    } else {
      out.dlogits.emplace_back(target.n, target.c, target.h, target.w);
    }
  }
  return out;
}

}  // namespace reactnet
