#pragma once

#include <vector>

#include "dsner/autodiff.hpp"
#include "dsner/data.hpp"
#include "dsner/train.hpp"

namespace dsner {

/// Linear-chain CRF head. trans(a, b) scores the move from tag a to tag b;
/// start scores the first tag of a sequence (so every position's emission is
/// consumed, including position 1).
struct CrfParams {
  Tensor Ws;     // [d_in, T]
  Tensor bs;     // [T]
  Tensor trans;  // [T, T]
  Tensor start;  // [T]

  std::size_t tag_count() const { return bs.numel(); }
  static CrfParams create(std::size_t d_in, std::size_t tags, Rng& rng);
};

struct BoundCrf {
  Var Ws, bs, trans, start;
  std::size_t tags = 0;
};
BoundCrf bind(Graph& g, CrfParams& p);

/// s(X, i) = Ws^T h_i + bs per position: [n, d_in] -> [n, T].
Var emission_scores(Graph& g, Var states, const BoundCrf& crf);

/// log Psi(Y|X) = start[y_1] + s_1[y_1] + sum_{i>=2} (s_i[y_i] + trans[y_{i-1}, y_i]).
Var sequence_score(Graph& g, Var emissions, const BoundCrf& crf, const std::vector<int>& labels);

/// Exact log of the partition sum over all |T|^n label sequences, by the
/// forward algorithm in log space.
Var log_partition(Graph& g, Var emissions, const BoundCrf& crf);

/// Negative log-likelihood: log_partition - sequence_score(gold). Always >= 0.
Var nll(Graph& g, Var emissions, const BoundCrf& crf, const std::vector<int>& gold);

struct ViterbiResult {
  std::vector<int> labels;
  double score = 0.0;
};

struct DecodeOptions {
  /// Tag masked out of start and transitions at decode time (-1: none).
  int pad_index = -1;
  /// When set, forbids label bigrams that are invalid under BIOES.
  const LabelScheme* bioes = nullptr;
};

/// Max-scoring label sequence under sequence_score; ties break toward the
/// lowest tag index. Pure value computation, no tape involved.
ViterbiResult viterbi(const Tensor& emissions, const Tensor& trans, const Tensor& start,
                      const DecodeOptions& options = {});

}  // namespace dsner
