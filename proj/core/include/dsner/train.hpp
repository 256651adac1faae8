#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dsner/autodiff.hpp"
#include "dsner/tensor.hpp"

namespace dsner {

class NerModel;
struct Sentence;

/// Seeded random source; all sampling in the project goes through one of
/// these so runs are reproducible from a single seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Xavier-normal weights: N(0, 2/(fan_in + fan_out)). 1-D shapes are biases
/// and come back all-zero. 3-D [w,k,d] convolution filters use fan_in = w*d,
/// fan_out = k.
Tensor xavier_init(const Shape& shape, Rng& rng);

/// N(0, 1/dim) embedding row, i.e. stddev sqrt(1/dim).
Tensor embedding_init(std::size_t dim, Rng& rng);

/// Plain N(0, stddev^2) tensor (the character embedding uses stddev 1).
Tensor normal_init(const Shape& shape, double stddev, Rng& rng);

/// Inverted dropout: in training, zero each element with probability `rate`
/// and scale survivors by 1/(1-rate); in inference, the identity.
Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, bool training);
Var apply_dropout(Graph& g, Var x, double rate, Rng& rng, bool training);

struct SgdConfig {
  double lr = 0.008;
  double momentum = 0.9;
  double l2 = 1e-8;
  double clip_norm = 5.0;
  bool clip = true;
  /// Per-epoch decay hook: effective lr = lr / (1 + lr_decay * epoch). Off by
  /// default (constant schedule).
  double lr_decay = 0.0;
};

/// SGD with momentum and L2: g <- grad + 2*l2*theta; v <- mu*v - lr*g;
/// theta <- theta + v. Gradients are clipped by global norm first when
/// enabled. Each parameter must be registered exactly once.
class SgdMomentum {
 public:
  SgdMomentum(std::vector<NamedParam> params, SgdConfig config);

  void step();
  void zero_grad();
  double grad_norm() const;
  std::size_t parameter_count() const { return params_.size(); }
  const SgdConfig& config() const { return config_; }
  SgdConfig& config() { return config_; }

 private:
  std::vector<NamedParam> params_;
  std::vector<Tensor> velocity_;
  SgdConfig config_;
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 10;
  std::uint64_t seed = 42;
  double dropout = 0.5;
  SgdConfig sgd;
};

struct EpochMetrics {
  double mean_loss = 0.0;
  double seconds = 0.0;
  std::vector<double> batch_losses;
};

/// One pass over the training set: shuffle with an epoch-seeded RNG, batch,
/// average the per-sentence losses, backpropagate, and step. Throws with
/// diagnostics (batch id, parameter norms) if the loss goes non-finite.
EpochMetrics train_epoch(NerModel& model, const std::vector<Sentence>& sentences,
                         const TrainConfig& config, SgdMomentum& optimizer, std::size_t epoch);

}  // namespace dsner
