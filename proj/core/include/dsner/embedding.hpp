#pragma once

#include <string>
#include <vector>

#include "dsner/autodiff.hpp"
#include "dsner/data.hpp"
#include "dsner/train.hpp"

namespace dsner {

struct EmbeddingMatrix {
  Tensor weights;  // [vocab size, d_e]
  bool trainable = true;

  std::size_t dim() const { return weights.cols(); }
  static EmbeddingMatrix random(std::size_t vocab_size, std::size_t d_e, Rng& rng);
};

/// Character convolution: embed code points, slide width-`window` filters with
/// zero padding, tanh, then max-pool each filter over the positions.
struct CharCnnParams {
  Tensor char_emb;  // [char vocab, d_c]
  Tensor filters;   // [filter count, window * d_c]; row f is filter f, time-major
  Tensor bias;      // [filter count]
  std::size_t window = 3;

  std::size_t char_dim() const { return char_emb.cols(); }
  std::size_t filter_count() const { return bias.numel(); }
  static CharCnnParams create(std::size_t char_vocab, std::size_t d_c, std::size_t filters,
                              std::size_t window, double emb_stddev, Rng& rng);
};

struct BoundCharCnn {
  Var char_emb, filters, bias;
  std::size_t window = 0, d_c = 0, n_filters = 0;
};
BoundCharCnn bind(Graph& g, CharCnnParams& p);

/// Loads GloVe-style "token v_1 ... v_{d_e}" lines into the rows of `out` for
/// tokens present in the vocabulary; returns how many rows were covered.
/// Rows without a pretrained vector keep their random initialization.
std::size_t load_pretrained(const std::string& path, const Vocab& vocab, std::size_t d_e,
                            EmbeddingMatrix& out);

/// Token set of a GloVe-style file (used to decide which pretrained tokens
/// join the vocabulary).
std::set<std::string> pretrained_token_set(const std::string& path);

Var char_features(Graph& g, const std::vector<std::size_t>& chars, const BoundCharCnn& p);

/// [n, d_e (+ filter count)] rows of word vector, optionally concatenated
/// with the character features. Only the rows the sentence touches are bound
/// into the graph.
Var embed_sentence(Graph& g, const Sentence& sentence, const Vocab& vocab, Tensor& word_weights,
                   const BoundCharCnn* char_cnn);

}  // namespace dsner
