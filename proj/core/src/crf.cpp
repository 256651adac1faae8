#include "dsner/crf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsner {

CrfParams CrfParams::create(std::size_t d_in, std::size_t tags, Rng& rng) {
  CrfParams p;
  p.Ws = xavier_init({d_in, tags}, rng);
  p.bs = Tensor::zeros({tags});
  p.trans = xavier_init({tags, tags}, rng);
  p.start = Tensor::zeros({tags});
  return p;
}

BoundCrf bind(Graph& g, CrfParams& p) {
  return BoundCrf{g.param(p.Ws), g.param(p.bs), g.param(p.trans), g.param(p.start),
                  p.tag_count()};
}

Var emission_scores(Graph& g, Var states, const BoundCrf& crf) {
  const Tensor& H = g.value(states);
  const Tensor& W = g.value(crf.Ws);
  if (H.ndim() != 2 || H.cols() != W.rows()) {
    throw std::invalid_argument("emission_scores: width mismatch " + shape_str(H.shape()) +
                                " x " + shape_str(W.shape()));
  }
  return g.add_rowvec(g.matmul(states, crf.Ws), crf.bs);
}

namespace {

void check_labels(const std::vector<int>& labels, std::size_t n, std::size_t tags,
                  const char* who) {
  if (labels.size() != n) {
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(n) + " positions");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= tags) {
      throw std::out_of_range(std::string(who) + ": label index " + std::to_string(y) +
                              " out of range for " + std::to_string(tags) + " tags");
    }
  }
}

}  // namespace

Var sequence_score(Graph& g, Var emissions, const BoundCrf& crf, const std::vector<int>& labels) {
  const Tensor& S = g.value(emissions);
  const std::size_t n = S.rows();
  check_labels(labels, n, crf.tags, "sequence_score");
  Var score = g.add(g.pick(crf.start, labels[0]), g.pick2(emissions, 0, labels[0]));
  for (std::size_t i = 1; i < n; ++i) {
    score = g.add(score, g.pick2(crf.trans, labels[i - 1], labels[i]));
    score = g.add(score, g.pick2(emissions, i, labels[i]));
  }
  return score;
}

Var log_partition(Graph& g, Var emissions, const BoundCrf& crf) {
  const Tensor& S = g.value(emissions);
  if (S.ndim() != 2 || S.cols() != crf.tags) {
    throw std::invalid_argument("log_partition: emissions " + shape_str(S.shape()) +
                                " do not match " + std::to_string(crf.tags) + " tags");
  }
  const std::size_t n = S.rows();
  Var alpha = g.add(crf.start, g.slice0(emissions, 0));
  for (std::size_t i = 1; i < n; ++i) {
    // scores[y', y] = alpha[y'] + trans[y', y], reduced over y'.
    Var scores = g.add_colvec(crf.trans, alpha);
    alpha = g.add(g.logsumexp(scores, 0), g.slice0(emissions, i));
  }
  return g.logsumexp(alpha, 0);
}

Var nll(Graph& g, Var emissions, const BoundCrf& crf, const std::vector<int>& gold) {
  return g.sub(log_partition(g, emissions, crf), sequence_score(g, emissions, crf, gold));
}

namespace {

// BIOES bigram validity: what may follow what, by tag kind and type.
struct TagInfo {
  char kind = 'O';  // 'O', 'B', 'I', 'E', 'S', 'P' (padding)
  std::string type;
};

TagInfo classify(const LabelScheme& scheme, std::size_t index) {
  const std::string& tag = scheme.tag(index);
  if (tag == "O") return {'O', ""};
  if (tag == "<pad>") return {'P', ""};
  return {tag[0], tag.substr(2)};
}

bool bioes_start_ok(const TagInfo& t) { return t.kind == 'O' || t.kind == 'B' || t.kind == 'S'; }

bool bioes_bigram_ok(const TagInfo& a, const TagInfo& b) {
  switch (a.kind) {
    case 'B':
    case 'I':
      // an open entity must continue or close with the same type
      return (b.kind == 'I' || b.kind == 'E') && b.type == a.type;
    case 'O':
    case 'E':
    case 'S':
      return b.kind == 'O' || b.kind == 'B' || b.kind == 'S';
    default:
      return false;
  }
}

constexpr double kMaskedScore = -1e30;

}  // namespace

ViterbiResult viterbi(const Tensor& emissions, const Tensor& trans, const Tensor& start,
                      const DecodeOptions& options) {
  if (emissions.ndim() != 2) {
    throw std::invalid_argument("viterbi: emissions must be [n, T], got " +
                                shape_str(emissions.shape()));
  }
  const std::size_t n = emissions.rows();
  const std::size_t T = emissions.cols();
  if (trans.ndim() != 2 || trans.rows() != T || trans.cols() != T || start.numel() != T) {
    throw std::invalid_argument("viterbi: parameter shapes " + shape_str(trans.shape()) + ", " +
                                shape_str(start.shape()) + " do not match " + std::to_string(T) +
                                " tags");
  }

  std::vector<TagInfo> info;
  if (options.bioes) {
    if (options.bioes->size() != T)
      throw std::invalid_argument("viterbi: scheme size does not match tag count");
    info.reserve(T);
    for (std::size_t y = 0; y < T; ++y) info.push_back(classify(*options.bioes, y));
  }
  auto start_allowed = [&](std::size_t y) {
    if (options.pad_index >= 0 && y == static_cast<std::size_t>(options.pad_index)) return false;
    if (options.bioes && !bioes_start_ok(info[y])) return false;
    return true;
  };
  auto move_allowed = [&](std::size_t a, std::size_t b) {
    if (options.pad_index >= 0 && (a == static_cast<std::size_t>(options.pad_index) ||
                                   b == static_cast<std::size_t>(options.pad_index)))
      return false;
    if (options.bioes && !bioes_bigram_ok(info[a], info[b])) return false;
    return true;
  };

  std::vector<std::vector<double>> delta(n, std::vector<double>(T));
  std::vector<std::vector<std::size_t>> back(n, std::vector<std::size_t>(T, 0));
  for (std::size_t y = 0; y < T; ++y) {
    delta[0][y] = start_allowed(y) ? start[y] + emissions(0, y) : kMaskedScore;
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < T; ++y) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t a = 0; a < T; ++a) {
        const double cand = move_allowed(a, y) ? delta[i - 1][a] + trans(a, y) + emissions(i, y)
                                               : kMaskedScore;
        if (cand > best) {
          best = cand;
          arg = a;
        }
      }
      delta[i][y] = best;
      back[i][y] = arg;
    }
  }

  ViterbiResult result;
  result.labels.assign(n, 0);
  double best = delta[n - 1][0];
  std::size_t arg = 0;
  for (std::size_t y = 1; y < T; ++y) {
    if (delta[n - 1][y] > best) {
      best = delta[n - 1][y];
      arg = y;
    }
  }
  result.score = best;
  result.labels[n - 1] = static_cast<int>(arg);
  for (std::size_t i = n - 1; i > 0; --i) {
    arg = back[i][arg];
    result.labels[i - 1] = static_cast<int>(arg);
  }
  return result;
}

}  // namespace dsner
