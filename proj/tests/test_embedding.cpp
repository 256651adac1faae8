#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dsner/embedding.hpp"
#include "dsner/gradcheck.hpp"
#include "oracles.hpp"

using namespace dsner;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "embtest_" + std::to_string(counter++) + ".txt";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Vocab vocab_of(std::vector<std::string> tokens) {
  RawSentence s;
  s.tokens = std::move(tokens);
  s.labels.assign(s.tokens.size(), "O");
  return Vocab::build({s}, {});
}

}  // namespace

TEST_CASE("pretrained rows are copied verbatim") {
  std::string line = "the";
  for (int i = 0; i < 100; ++i) line += " " + std::to_string(0.01 * i);
  TempFile file(line + "\n");
  const Vocab v = vocab_of({"the"});
  Rng rng(1);
  EmbeddingMatrix m = EmbeddingMatrix::random(v.size(), 100, rng);
  const std::size_t covered = load_pretrained(file.path, v, 100, m);
  CHECK(covered == 1);
  const std::size_t row = v.lookup("the");
  for (std::size_t c = 0; c < 100; ++c) CHECK(m.weights(row, c) == doctest::Approx(0.01 * c));
}

TEST_CASE("uncovered rows keep their N(0, 1/d) initialization") {
  TempFile file("other 1 2 3 4\n");
  const Vocab v = vocab_of({"the"});
  Rng rng(2);
  EmbeddingMatrix m = EmbeddingMatrix::random(v.size(), 4, rng);
  const Tensor before = m.weights;
  const std::size_t covered = load_pretrained(file.path, v, 4, m);
  CHECK(covered == 0);
  for (std::size_t i = 0; i < m.weights.numel(); ++i) CHECK(m.weights[i] == before[i]);
}

TEST_CASE("random embedding rows target stddev sqrt(1/d)") {
  Rng rng(3);
  EmbeddingMatrix m = EmbeddingMatrix::random(200, 100, rng);
  double sq = 0.0;
  for (std::size_t i = 0; i < m.weights.numel(); ++i) sq += m.weights[i] * m.weights[i];
  const double std = std::sqrt(sq / static_cast<double>(m.weights.numel()));
  CHECK(std == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("a malformed embedding line reports its number") {
  std::string line = "the";
  for (int i = 0; i < 99; ++i) line += " 0.5";
  TempFile file(line + "\n");
  const Vocab v = vocab_of({"the"});
  Rng rng(4);
  EmbeddingMatrix m = EmbeddingMatrix::random(v.size(), 100, rng);
  CHECK_THROWS_WITH_AS(load_pretrained(file.path, v, 100, m), doctest::Contains("line 1"),
                       std::runtime_error);
}

TEST_CASE("zero filters and bias give a zero feature vector") {
  Rng rng(5);
  CharCnnParams p = CharCnnParams::create(10, 4, 6, 3, 1.0, rng);
  p.filters.fill(0.0);
  p.bias.fill(0.0);
  Graph g;
  const BoundCharCnn b = bind(g, p);
  const Tensor& out = g.value(char_features(g, {1, 2, 3}, b));
  REQUIRE(out.numel() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("single character and window 3 reduce to one padded window") {
  Rng rng(6);
  CharCnnParams p = CharCnnParams::create(5, 3, 4, 3, 1.0, rng);
  const std::size_t ch = 2;
  Graph g;
  const BoundCharCnn b = bind(g, p);
  const Tensor& got = g.value(char_features(g, {ch}, b));
  // hand-unrolled: the only window is [zero, emb[ch], zero]
  for (std::size_t f = 0; f < 4; ++f) {
    double acc = p.bias[f];
    for (std::size_t j = 0; j < 3; ++j) acc += p.filters(f, 3 + j) * p.char_emb(ch, j);
    CHECK(got[f] == doctest::Approx(std::tanh(acc)).epsilon(1e-12));
  }
}

TEST_CASE("repeating the word never decreases a pooled feature") {
  // word+word sees a superset of the original windows, padded edges included
  Rng rng(7);
  CharCnnParams p = CharCnnParams::create(12, 4, 5, 3, 1.0, rng);
  auto r = oracle::rng(70);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> word;
    const std::size_t len = 2 + r() % 5;  // a length-1 word's padded window never recurs
    for (std::size_t i = 0; i < len; ++i) word.push_back(r() % 12);
    std::vector<std::size_t> doubled = word;
    doubled.insert(doubled.end(), word.begin(), word.end());
    Graph g;
    const BoundCharCnn b = bind(g, p);
    const Tensor base = g.value(char_features(g, word, b));
    const Tensor more = g.value(char_features(g, doubled, b));
    for (std::size_t f = 0; f < 5; ++f) CHECK(more[f] >= base[f] - 1e-12);
  }
}

TEST_CASE("embed_sentence widths follow the configuration") {
  const Vocab v = vocab_of({"alpha", "beta"});
  Rng rng(8);
  EmbeddingMatrix words = EmbeddingMatrix::random(v.size(), 100, rng);
  CharCnnParams chars = CharCnnParams::create(v.char_count(), 30, 30, 3, 1.0, rng);

  Sentence s;
  s.tokens = {"alpha"};
  s.chars = {v.encode_chars("alpha")};
  s.gold = {0};

  Graph g;
  BoundCharCnn bc = bind(g, chars);
  const Tensor& with_chars = g.value(embed_sentence(g, s, v, words.weights, &bc));
  CHECK(with_chars.rows() == 1);
  CHECK(with_chars.cols() == 130);

  Graph g2;
  const Tensor& without = g2.value(embed_sentence(g2, s, v, words.weights, nullptr));
  CHECK(without.cols() == 100);
}

TEST_CASE("the same token embeds to identical rows") {
  const Vocab v = vocab_of({"twice"});
  Rng rng(9);
  EmbeddingMatrix words = EmbeddingMatrix::random(v.size(), 8, rng);
  CharCnnParams chars = CharCnnParams::create(v.char_count(), 4, 5, 3, 1.0, rng);
  Sentence s;
  s.tokens = {"twice", "twice"};
  s.chars = {v.encode_chars("twice"), v.encode_chars("twice")};
  s.gold = {0, 0};
  Graph g;
  BoundCharCnn bc = bind(g, chars);
  const Tensor& rows = g.value(embed_sentence(g, s, v, words.weights, &bc));
  for (std::size_t c = 0; c < rows.cols(); ++c) CHECK(rows(0, c) == rows(1, c));
}

TEST_CASE("output width is constant across sentences for a fixed config") {
  const Vocab v = vocab_of({"a", "bb", "ccc"});
  Rng rng(11);
  EmbeddingMatrix words = EmbeddingMatrix::random(v.size(), 8, rng);
  CharCnnParams chars = CharCnnParams::create(v.char_count(), 4, 5, 3, 1.0, rng);
  std::size_t width = 0;
  for (const char* tok : {"a", "bb", "ccc", "zzzz"}) {
    Sentence s;
    s.tokens = {tok};
    s.chars = {v.encode_chars(tok)};
    s.gold = {0};
    Graph g;
    BoundCharCnn bc = bind(g, chars);
    const Tensor& rows = g.value(embed_sentence(g, s, v, words.weights, &bc));
    if (width == 0) width = rows.cols();
    CHECK(rows.cols() == width);
  }
}

TEST_CASE("gradients flow into the character embedding") {
  Rng rng(10);
  CharCnnParams p = CharCnnParams::create(6, 3, 4, 3, 1.0, rng);
  const std::vector<std::size_t> word{1, 4, 2};
  const double err = finite_diff_check(
      [&](Graph& g, const std::vector<Var>& in) {
        BoundCharCnn b{in[0], in[1], in[2], 3, 3, 4};
        return g.sum(char_features(g, word, b));
      },
      {&p.char_emb, &p.filters, &p.bias}, 1e-4);
  CHECK(err < 1e-4);
}
