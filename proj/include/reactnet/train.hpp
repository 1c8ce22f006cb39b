#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "reactnet/adam.hpp"
#include "reactnet/distmat.hpp"
#include "reactnet/error.hpp"
#include "reactnet/net.hpp"
#include "reactnet/subblocks.hpp"

namespace reactnet {

struct TrainConfig {
  int epochs = 3;
  double lr = 0.002;
  int batch = 8;
  SamplerConfig sampler;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
    if (batch < 1) throw ConfigError("batch size must be >= 1");
    sampler.validate();
  }
};

struct TrainingVideo {
  DistanceMatrix m;
  AnnotationMatrix a;
};

/// A network-ready training pair at canonical resolution.
struct TrainingSample {
  std::vector<float> input;
  std::vector<float> target;
};

inline TrainingSample to_training_sample(const SubBlock& b) {
  TrainingSample s;
  const auto n = static_cast<std::size_t>(b.resized_input.size());
  s.input.resize(n);
  s.target.resize(n);
  // row-major order to match the NCHW layout
  const Eigen::Index side = b.resized_input.rows();
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) {
      const auto i = static_cast<std::size_t>(r * side + c);
      s.input[i] = static_cast<float>(b.resized_input(r, c));
      s.target[i] = static_cast<float>(b.resized_target(r, c));
    }
  return s;
}

template <class T>
void pack_batch(std::span<const TrainingSample* const> samples, int side, Tensor4<T>& x, Tensor4<T>& y) {
  const int count = static_cast<int>(samples.size());
  x = Tensor4<T>(count, 1, side, side);
  y = Tensor4<T>(count, 1, side, side);
  for (int i = 0; i < count; ++i) {
    std::copy(samples[i]->input.begin(), samples[i]->input.end(), x.channel(i, 0));
    std::copy(samples[i]->target.begin(), samples[i]->target.end(), y.channel(i, 0));
  }
}

/// One optimisation step on a mini-batch; throws NumericError if the loss is not finite.
template <class T>
StagedLoss<T> train_step(ReActNet<T>& model, AdamState<T>& adam, const Tensor4<T>& x, const Tensor4<T>& y) {
  model.zero_grad();
  const auto preds = model.forward_train(x);
  StagedLoss<T> loss = staged_loss(preds, y, model.config());
  if (!std::isfinite(loss.total)) {
    std::ostringstream msg;
    msg << "non-finite training loss at Adam step " << adam.t + 1 << " (per-stage:";
    for (double v : loss.per_stage) msg << ' ' << v;
    msg << ")";
    throw NumericError(msg.str());
  }
  model.backward(loss.dlogits);
  auto params = model.parameters();
  adam_step<T>(params, adam);
  return loss;
}

struct TrainProgress {
  int epoch = 0;
  std::int64_t step = 0;
  std::int64_t steps_in_epoch = 0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<double> epoch_loss;   // mean staged loss per epoch
  std::vector<double> step_loss;    // staged loss of every Adam step
  std::vector<std::int64_t> epoch_blocks;
};

/// Trains on freshly sampled diagonal sub-blocks every epoch (the random block
/// sizes act as temporal-scale augmentation), shuffled with the seeded generator.
template <class T>
TrainResult train(ReActNet<T>& model, const std::vector<TrainingVideo>& dataset, const TrainConfig& cfg,
                  const std::function<void(const TrainProgress&)>& on_epoch = {}) {
  cfg.validate();
  if (dataset.empty()) throw DataError("training dataset is empty");
  if (cfg.sampler.canonical != model.config().canonical)
    throw ConfigError("sampler canonical size " + std::to_string(cfg.sampler.canonical) + " differs from the model's " +
                      std::to_string(model.config().canonical));

  std::mt19937_64 rng(cfg.seed);
  AdamState<T> adam;
  adam.lr = cfg.lr;
  TrainResult result;
  const int side = model.config().canonical;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<TrainingSample> samples;
    for (const auto& video : dataset)
      for (const auto& b : sample_training_subblocks(video.m, video.a, cfg.sampler, rng)) samples.push_back(to_training_sample(b));
    std::shuffle(samples.begin(), samples.end(), rng);

    double sum = 0.0;
    std::int64_t steps = 0;
    Tensor4<T> x, y;
    std::vector<const TrainingSample*> batch;
    for (std::size_t first = 0; first < samples.size(); first += static_cast<std::size_t>(cfg.batch)) {
      batch.clear();
      for (std::size_t i = first; i < std::min(samples.size(), first + static_cast<std::size_t>(cfg.batch)); ++i)
        batch.push_back(&samples[i]);
      pack_batch<T>(batch, side, x, y);
      const auto loss = train_step(model, adam, x, y);
      result.step_loss.push_back(loss.total);
      sum += loss.total;
      ++steps;
    }
    result.epoch_loss.push_back(sum / static_cast<double>(std::max<std::int64_t>(steps, 1)));
    result.epoch_blocks.push_back(static_cast<std::int64_t>(samples.size()));
    if (on_epoch) on_epoch({epoch, adam.t, steps, result.epoch_loss.back()});
  }
  return result;
}

}  // namespace reactnet
