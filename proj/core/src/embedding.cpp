#include "dsner/embedding.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsner {

EmbeddingMatrix EmbeddingMatrix::random(std::size_t vocab_size, std::size_t d_e, Rng& rng) {
  EmbeddingMatrix m;
  m.weights = Tensor({vocab_size, d_e});
  for (std::size_t r = 0; r < vocab_size; ++r) {
    const Tensor row = embedding_init(d_e, rng);
    for (std::size_t c = 0; c < d_e; ++c) m.weights(r, c) = row[c];
  }
  return m;
}

CharCnnParams CharCnnParams::create(std::size_t char_vocab, std::size_t d_c, std::size_t filters,
                                    std::size_t window, double emb_stddev, Rng& rng) {
  if (window % 2 == 0) throw std::invalid_argument("char cnn: window must be odd");
  CharCnnParams p;
  p.char_emb = normal_init({char_vocab, d_c}, emb_stddev, rng);
  p.filters = xavier_init({filters, window * d_c}, rng);
  p.bias = Tensor::zeros({filters});
  p.window = window;
  return p;
}

BoundCharCnn bind(Graph& g, CharCnnParams& p) {
  BoundCharCnn b;
  b.char_emb = g.param(p.char_emb);
  b.filters = g.param(p.filters);
  b.bias = g.param(p.bias);
  b.window = p.window;
  b.d_c = p.char_dim();
  b.n_filters = p.filter_count();
  return b;
}

std::set<std::string> pretrained_token_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  std::set<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) continue;
    tokens.insert(line.substr(0, sp));
  }
  return tokens;
}

std::size_t load_pretrained(const std::string& path, const Vocab& vocab, std::size_t d_e,
                            EmbeddingMatrix& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  if (out.weights.rows() != vocab.size() || out.weights.cols() != d_e) {
    throw std::invalid_argument("load_pretrained: matrix shape " + shape_str(out.weights.shape()) +
                                " does not match vocab size " + std::to_string(vocab.size()) +
                                " x " + std::to_string(d_e));
  }
  std::size_t covered = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream cols(line);
    std::string token;
    cols >> token;
    if (!vocab.contains(token)) continue;
    std::vector<double> values;
    values.reserve(d_e);
    double v;
    while (cols >> v) values.push_back(v);
    if (values.size() != d_e) {
      throw std::runtime_error("load_pretrained: line " + std::to_string(line_no) + " has " +
                               std::to_string(values.size()) + " values, expected " +
                               std::to_string(d_e));
    }
    const std::size_t row = vocab.lookup(token);
    for (std::size_t c = 0; c < d_e; ++c) out.weights(row, c) = values[c];
    ++covered;
  }
  return covered;
}

Var char_features(Graph& g, const std::vector<std::size_t>& chars, const BoundCharCnn& p) {
  std::vector<std::size_t> ids = chars;
  if (ids.empty()) ids.push_back(0);  // pad an empty word to one unk character
  const std::size_t m = ids.size();
  const std::size_t pad = (p.window - 1) / 2;

  std::vector<Var> embedded;
  embedded.reserve(m);
  for (std::size_t c : ids) embedded.push_back(g.slice0(p.char_emb, c));
  const Var zero = g.input(Tensor::zeros({p.d_c}));

  // Same-length convolution: one window per character position.
  std::vector<Var> responses;
  responses.reserve(m);
  for (std::size_t pos = 0; pos < m; ++pos) {
    std::vector<Var> window;
    window.reserve(p.window);
    for (std::size_t t = 0; t < p.window; ++t) {
      const long src = static_cast<long>(pos) + static_cast<long>(t) - static_cast<long>(pad);
      window.push_back(src < 0 || src >= static_cast<long>(m) ? zero
                                                              : embedded[static_cast<std::size_t>(src)]);
    }
    Var resp = g.add(g.matvec(p.filters, g.concat(window)), p.bias);
    responses.push_back(g.tanh(resp));
  }
  return g.max_cols(g.stack_rows(responses));
}

Var embed_sentence(Graph& g, const Sentence& sentence, const Vocab& vocab, Tensor& word_weights,
                   const BoundCharCnn* char_cnn) {
  if (sentence.size() == 0) throw std::invalid_argument("embed_sentence: empty sentence");
  std::vector<std::size_t> indices;
  indices.reserve(sentence.size());
  for (const std::string& token : sentence.tokens) {
    const std::size_t idx = vocab.lookup(token);
    if (idx >= word_weights.rows()) {
      throw std::out_of_range("embed_sentence: token index " + std::to_string(idx) +
                              " out of range for " + shape_str(word_weights.shape()));
    }
    indices.push_back(idx);
  }
  Var words = g.param_rows(word_weights, indices);
  if (!char_cnn) return words;
  std::vector<Var> rows;
  rows.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    Var cf = char_features(g, sentence.chars[i], *char_cnn);
    rows.push_back(g.concat({g.slice0(words, i), cf}));
  }
  return g.stack_rows(rows);
}

}  // namespace dsner
