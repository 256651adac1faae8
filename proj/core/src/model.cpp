#include "dsner/model.hpp"

#include <stdexcept>

namespace dsner {

std::size_t ModelConfig::encoder_input_width(std::size_t layer) const {
  if (layer == 0) return embed_width();
  const std::size_t below = 2 * lstm_size;
  return deform_between_layers() ? offsets * below : below;
}

std::size_t ModelConfig::scorer_input_width() const {
  const std::size_t top = 2 * lstm_size;
  return deform_before_scorer() ? offsets * top : top;
}

std::size_t ModelConfig::connection_count() const {
  std::size_t count = 0;
  if (deform_between_layers()) count += layers - 1;
  if (deform_before_scorer()) count += 1;
  return count;
}

void ModelConfig::validate() const {
  if (structure < 0 || structure > 3) {
    throw std::invalid_argument("model config: structure must be 1, 2 or 3, got " +
                                std::to_string(structure));
  }
  if (layers < 1) throw std::invalid_argument("model config: need at least one encoder layer");
  if (deform_between_layers() && layers < 2) {
    throw std::invalid_argument("model config: structure " + std::to_string(structure) +
                                " places connections between layers and needs >= 2 encoder "
                                "layers, got " +
                                std::to_string(layers));
  }
  if (offsets < 1) throw std::invalid_argument("model config: offset count k must be >= 1");
  if (offset_window % 2 == 0) {
    throw std::invalid_argument("model config: offset window must be odd, got " +
                                std::to_string(offset_window));
  }
  if (use_char && char_window % 2 == 0) {
    throw std::invalid_argument("model config: char window must be odd, got " +
                                std::to_string(char_window));
  }
}

NerModel::NerModel(ModelConfig config, Vocab vocab, LabelScheme scheme, std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)), scheme_(std::move(scheme)) {
  config_.validate();
  Rng rng(seed);
  word_emb_ = EmbeddingMatrix::random(vocab_.size(), config_.word_dim, rng);
  if (config_.use_char) {
    char_ = CharCnnParams::create(vocab_.char_count(), config_.char_dim, config_.char_filters,
                                  config_.char_window, config_.char_emb_stddev, rng);
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    encoder_.push_back(
        BiLstmParams::create(config_.encoder_input_width(l), config_.lstm_size, rng));
  }
  const std::size_t hidden = 2 * config_.lstm_size;
  if (config_.deform_between_layers()) {
    for (std::size_t l = 0; l + 1 < config_.layers; ++l) {
      between_.push_back(OffsetPredictor::create(config_.offset_mode, hidden, config_.offsets,
                                                 config_.offset_window, rng));
    }
  }
  if (config_.deform_before_scorer()) {
    scorer_pred_ = OffsetPredictor::create(config_.offset_mode, hidden, config_.offsets,
                                           config_.offset_window, rng);
  }
  crf_ = CrfParams::create(config_.scorer_input_width(), scheme_.size(), rng);
}

NerModel::Forward NerModel::forward(Graph& g, const Sentence& sentence, bool training,
                                    double dropout_rate, Rng* dropout_rng) {
  if (sentence.size() == 0) throw std::invalid_argument("forward: empty sentence");
  const bool drop = training && dropout_rate > 0.0;
  if (drop && !dropout_rng) {
    throw std::invalid_argument("forward: dropout requested without an RNG");
  }

  Forward result;
  std::optional<BoundCharCnn> chars;
  if (config_.use_char) chars = bind(g, char_);

  Var cur = embed_sentence(g, sentence, vocab_, word_emb_.weights,
                           chars ? &chars.value() : nullptr);
  if (drop) cur = apply_dropout(g, cur, dropout_rate, *dropout_rng, true);

  Var top = cur;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    top = bilstm_forward(g, cur, encoder_[l]);
    if (drop) top = apply_dropout(g, top, dropout_rate, *dropout_rng, true);
    if (l + 1 < config_.layers) {
      if (config_.deform_between_layers()) {
        DeformResult dr = deformable_connect(g, top, between_[l]);
        result.offsets.push_back(std::move(dr.field));
        cur = dr.z;
      } else {
        cur = top;
      }
    }
  }

  Var scorer_in = top;
  if (config_.deform_before_scorer()) {
    DeformResult dr = deformable_connect(g, top, *scorer_pred_);
    result.offsets.push_back(std::move(dr.field));
    scorer_in = dr.z;
  }

  result.crf = bind(g, crf_);
  result.emissions = emission_scores(g, scorer_in, result.crf);
  return result;
}

Var NerModel::loss(Graph& g, const Sentence& sentence, bool training, Rng* dropout_rng) {
  Forward f = forward(g, sentence, training, training ? train_dropout : 0.0, dropout_rng);
  return nll(g, f.emissions, f.crf, sentence.gold);
}

ViterbiResult NerModel::decode(const Sentence& sentence) {
  Graph g;
  Forward f = forward(g, sentence, /*training=*/false, 0.0, nullptr);
  DecodeOptions options;
  options.pad_index = scheme_.pad_index();
  return viterbi(g.value(f.emissions), crf_.trans, crf_.start, options);
}

std::vector<std::string> NerModel::tag(const Sentence& sentence) {
  const ViterbiResult r = decode(sentence);
  std::vector<std::string> tags;
  tags.reserve(r.labels.size());
  for (int y : r.labels) tags.push_back(scheme_.tag(static_cast<std::size_t>(y)));
  return tags;
}

std::vector<NamedParam> NerModel::parameters() {
  std::vector<NamedParam> out;
  out.push_back({"embed.word", &word_emb_.weights});
  if (config_.use_char) {
    out.push_back({"char_cnn.emb", &char_.char_emb});
    out.push_back({"char_cnn.filters", &char_.filters});
    out.push_back({"char_cnn.bias", &char_.bias});
  }
  for (std::size_t l = 0; l < encoder_.size(); ++l) {
    const std::string p = "enc.l" + std::to_string(l);
    out.push_back({p + ".fwd.W", &encoder_[l].fwd.W});
    out.push_back({p + ".fwd.U", &encoder_[l].fwd.U});
    out.push_back({p + ".fwd.b", &encoder_[l].fwd.b});
    out.push_back({p + ".bwd.W", &encoder_[l].bwd.W});
    out.push_back({p + ".bwd.U", &encoder_[l].bwd.U});
    out.push_back({p + ".bwd.b", &encoder_[l].bwd.b});
  }
  for (std::size_t c = 0; c < between_.size(); ++c) {
    out.push_back({"deform.between" + std::to_string(c) + ".weights", &between_[c].weights});
  }
  if (scorer_pred_) out.push_back({"deform.scorer.weights", &scorer_pred_->weights});
  out.push_back({"crf.Ws", &crf_.Ws});
  out.push_back({"crf.bs", &crf_.bs});
  out.push_back({"crf.trans", &crf_.trans});
  out.push_back({"crf.start", &crf_.start});
  return out;
}

}  // namespace dsner
