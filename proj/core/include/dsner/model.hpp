#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsner/crf.hpp"
#include "dsner/data.hpp"
#include "dsner/deform.hpp"
#include "dsner/embedding.hpp"
#include "dsner/encoder.hpp"

namespace dsner {

/// Architecture knobs. Structure selects where deformable connections sit:
/// 1 between BiLSTM layers, 2 between the top BiLSTM and the CRF scorer,
/// 3 both; 0 is the vanilla stacked baseline (library-level only, the CLI
/// accepts 1..3). Defaults follow the CoNLL column of the shipped
/// hyper-parameter table.
struct ModelConfig {
  int structure = 2;
  std::size_t layers = 1;
  std::size_t lstm_size = 256;  // per direction
  std::size_t word_dim = 100;
  bool use_char = true;
  std::size_t char_dim = 30;
  std::size_t char_filters = 30;
  std::size_t char_window = 3;
  double char_emb_stddev = 1.0;
  std::size_t offsets = 3;        // k
  std::size_t offset_window = 3;  // w
  OffsetMode offset_mode = OffsetMode::Wide;

  bool deform_between_layers() const { return structure == 1 || structure == 3; }
  bool deform_before_scorer() const { return structure == 2 || structure == 3; }
  std::size_t embed_width() const { return word_dim + (use_char ? char_filters : 0); }
  std::size_t encoder_input_width(std::size_t layer) const;
  std::size_t scorer_input_width() const;
  std::size_t connection_count() const;
  void validate() const;
};

/// The assembled tagger: embedding, stacked BiLSTM encoder, the configured
/// deformable connections, and a linear-chain CRF head.
class NerModel {
 public:
  NerModel(ModelConfig config, Vocab vocab, LabelScheme scheme, std::uint64_t seed);

  struct Forward {
    Var emissions;                     // [n, T]
    BoundCrf crf;                      // head bound into the same graph
    std::vector<OffsetField> offsets;  // one [n, k] field per connection
  };

  Forward forward(Graph& g, const Sentence& sentence, bool training, double dropout_rate,
                  Rng* dropout_rng);
  Var loss(Graph& g, const Sentence& sentence, bool training, Rng* dropout_rng);
  ViterbiResult decode(const Sentence& sentence);
  std::vector<std::string> tag(const Sentence& sentence);

  std::vector<NamedParam> parameters();
  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const LabelScheme& scheme() const { return scheme_; }
  std::size_t connection_count() const { return config_.connection_count(); }

  double train_dropout = 0.5;  // rate used by loss() when training

  EmbeddingMatrix& word_embedding() { return word_emb_; }
  CharCnnParams& char_cnn() { return char_; }
  CrfParams& crf() { return crf_; }
  std::vector<BiLstmParams>& encoder_layers() { return encoder_; }
  std::vector<OffsetPredictor>& between_predictors() { return between_; }
  std::optional<OffsetPredictor>& scorer_predictor() { return scorer_pred_; }

 private:
  ModelConfig config_;
  Vocab vocab_;
  LabelScheme scheme_;
  EmbeddingMatrix word_emb_;
  CharCnnParams char_;
  std::vector<BiLstmParams> encoder_;
  std::vector<OffsetPredictor> between_;
  std::optional<OffsetPredictor> scorer_pred_;
  CrfParams crf_;
};

}  // namespace dsner
