#include "dsner/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dsner/data.hpp"
#include "dsner/model.hpp"

namespace dsner {

Tensor xavier_init(const Shape& shape, Rng& rng) {
  if (shape.empty()) throw std::invalid_argument("xavier_init: empty shape");
  if (shape.size() == 1) return Tensor::zeros(shape);  // bias rule
  double fan_in = 0.0, fan_out = 0.0;
  if (shape.size() == 2) {
    fan_out = static_cast<double>(shape[0]);
    fan_in = static_cast<double>(shape[1]);
  } else {
    // [w, k, d] filter bank: k outputs fed by a w*d window.
    fan_out = static_cast<double>(shape[1]);
    fan_in = static_cast<double>(shape[0] * shape[2]);
  }
  const double stddev = std::sqrt(2.0 / (fan_in + fan_out));
  Tensor t(shape);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

Tensor embedding_init(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("embedding_init: dim must be >= 1");
  const double stddev = std::sqrt(1.0 / static_cast<double>(dim));
  Tensor t({dim});
  for (std::size_t i = 0; i < dim; ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

Tensor normal_init(const Shape& shape, double stddev, Rng& rng) {
  Tensor t(shape);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

namespace {

Tensor dropout_mask(const Shape& shape, double rate, Rng& rng) {
  Tensor mask(shape);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < mask.numel(); ++i) {
    mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

}  // namespace

Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
  if (!training || rate == 0.0) return x;
  const Tensor mask = dropout_mask(x.shape(), rate, rng);
  Tensor out(x.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = x[i] * mask[i];
  return out;
}

Var apply_dropout(Graph& g, Var x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
  if (!training || rate == 0.0) return x;
  return g.mul_mask(x, dropout_mask(g.value(x).shape(), rate, rng));
}

SgdMomentum::SgdMomentum(std::vector<NamedParam> params, SgdConfig config)
    : params_(std::move(params)), config_(config) {
  velocity_.reserve(params_.size());
  for (const NamedParam& p : params_) {
    if (!p.tensor) throw std::invalid_argument("optimizer: null parameter '" + p.name + "'");
    velocity_.push_back(Tensor::zeros(p.tensor->shape()));
  }
}

double SgdMomentum::grad_norm() const {
  double sq = 0.0;
  for (const NamedParam& p : params_) {
    if (!p.tensor->has_grad()) continue;
    for (double g : p.tensor->grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

void SgdMomentum::zero_grad() {
  for (const NamedParam& p : params_) p.tensor->zero_grad();
}

void SgdMomentum::step() {
  double scale = 1.0;
  if (config_.clip) {
    const double norm = grad_norm();
    if (norm > config_.clip_norm && norm > 0.0) scale = config_.clip_norm / norm;
  }
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& theta = *params_[k].tensor;
    Tensor& vel = velocity_[k];
    std::vector<double>& grad = theta.grad();
    for (std::size_t i = 0; i < theta.numel(); ++i) {
      const double g = scale * grad[i] + 2.0 * config_.l2 * theta[i];
      vel[i] = config_.momentum * vel[i] - config_.lr * g;
      theta[i] += vel[i];
    }
  }
}

EpochMetrics train_epoch(NerModel& model, const std::vector<Sentence>& sentences,
                         const TrainConfig& config, SgdMomentum& optimizer, std::size_t epoch) {
  if (sentences.empty()) throw std::invalid_argument("train_epoch: empty training set");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(config.seed + 0x9E3779B97F4A7C15ull * (epoch + 1));
  std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
  Rng dropout_rng(config.seed ^ (0xD1B54A32D192ED03ull + epoch));

  optimizer.config().lr =
      config.sgd.lr / (1.0 + config.sgd.lr_decay * static_cast<double>(epoch));

  EpochMetrics metrics;
  double total = 0.0;
  std::size_t batch_id = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_id) {
    const std::size_t end = std::min(begin + config.batch_size, order.size());
    const double inv = 1.0 / static_cast<double>(end - begin);
    optimizer.zero_grad();
    double batch_loss = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      Graph g;
      Var nll = model.loss(g, sentences[order[s]], /*training=*/true, &dropout_rng);
      Var scaled = g.scale(nll, inv);
      batch_loss += g.scalar(scaled);
      g.backward(scaled);
    }
    if (!std::isfinite(batch_loss)) {
      std::ostringstream msg;
      msg << "train_epoch: non-finite loss in epoch " << epoch << ", batch " << batch_id
          << "; parameter norms:";
      for (const NamedParam& p : model.parameters()) {
        double sq = 0.0;
        for (std::size_t i = 0; i < p.tensor->numel(); ++i) sq += (*p.tensor)[i] * (*p.tensor)[i];
        msg << " " << p.name << "=" << std::sqrt(sq);
      }
      throw std::runtime_error(msg.str());
    }
    optimizer.step();
    metrics.batch_losses.push_back(batch_loss);
    total += batch_loss * static_cast<double>(end - begin);
  }
  metrics.mean_loss = total / static_cast<double>(sentences.size());
  metrics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return metrics;
}

}  // namespace dsner
