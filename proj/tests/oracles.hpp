// Independent brute-force oracles for the test suites. Everything here is
// deliberately written against the math, not against the library code paths
// it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "dsner/tensor.hpp"

namespace oracle {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& r, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(r);
}

inline dsner::Tensor random_tensor(std::mt19937_64& r, dsner::Shape shape, double lo = -1.0,
                                   double hi = 1.0) {
  dsner::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = uniform(r, lo, hi);
  return t;
}

// ------------------------------------------------------------ numeric core

inline dsner::Tensor triple_loop_matmul(const dsner::Tensor& A, const dsner::Tensor& B) {
  const std::size_t m = A.rows(), k = A.cols(), p = B.cols();
  dsner::Tensor C({m, p});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += A(i, t) * B(t, j);
      C(i, j) = acc;
    }
  return C;
}

inline double naive_logsumexp(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::exp(x);
  return std::log(acc);
}

// Scalar-loop LSTM cell over merged-gate parameters [i; f; o; g].
struct ScalarLstmOut {
  std::vector<double> h, c;
};

inline ScalarLstmOut scalar_lstm_cell(const dsner::Tensor& W, const dsner::Tensor& U,
                                      const dsner::Tensor& b, const std::vector<double>& x,
                                      const std::vector<double>& h_prev,
                                      const std::vector<double>& c_prev) {
  const std::size_t d = h_prev.size();
  const std::size_t din = x.size();
  auto gate = [&](std::size_t block, std::size_t row) {
    double acc = b[block * d + row];
    for (std::size_t j = 0; j < din; ++j) acc += W(block * d + row, j) * x[j];
    for (std::size_t j = 0; j < d; ++j) acc += U(block * d + row, j) * h_prev[j];
    return acc;
  };
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  ScalarLstmOut out;
  out.h.resize(d);
  out.c.resize(d);
  for (std::size_t r = 0; r < d; ++r) {
    const double gi = sigmoid(gate(0, r));
    const double gf = sigmoid(gate(1, r));
    const double go = sigmoid(gate(2, r));
    const double gg = std::tanh(gate(3, r));
    out.c[r] = gf * c_prev[r] + gi * gg;
    out.h[r] = go * std::tanh(out.c[r]);
  }
  return out;
}

// ------------------------------------------------------------ CRF enumeration

// Left-to-right accumulation, matching the decoder's addition order exactly.
inline double chain_score(const dsner::Tensor& emissions, const dsner::Tensor& trans,
                          const dsner::Tensor& start, const std::vector<int>& labels) {
  double s = start[labels[0]] + emissions(0, labels[0]);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    s = s + trans(labels[i - 1], labels[i]);
    s = s + emissions(i, labels[i]);
  }
  return s;
}

inline void enumerate_sequences(std::size_t n, std::size_t T,
                                const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> labels(n, 0);
  while (true) {
    visit(labels);
    std::size_t pos = 0;
    while (pos < n) {
      if (++labels[pos] < static_cast<int>(T)) break;
      labels[pos] = 0;
      ++pos;
    }
    if (pos == n) return;
  }
}

struct CrfEnumeration {
  double log_partition = 0.0;
  double best_score = 0.0;
  std::vector<int> best_labels;
  std::vector<std::vector<double>> marginals;  // [n][T]
};

inline CrfEnumeration enumerate_crf(const dsner::Tensor& emissions, const dsner::Tensor& trans,
                                    const dsner::Tensor& start) {
  const std::size_t n = emissions.rows();
  const std::size_t T = emissions.cols();
  std::vector<double> scores;
  std::vector<std::vector<int>> sequences;
  enumerate_sequences(n, T, [&](const std::vector<int>& labels) {
    scores.push_back(chain_score(emissions, trans, start, labels));
    sequences.push_back(labels);
  });

  CrfEnumeration out;
  const double mx = *std::max_element(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - mx);
  out.log_partition = mx + std::log(acc);

  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  out.best_score = scores[best];
  out.best_labels = sequences[best];

  out.marginals.assign(n, std::vector<double>(T, 0.0));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = std::exp(scores[i] - out.log_partition);
    for (std::size_t pos = 0; pos < n; ++pos) out.marginals[pos][sequences[i][pos]] += p;
  }
  return out;
}

// ------------------------------------------------------------ BIO spans

struct BioSpan {
  std::size_t start, end;
  std::string type;
  bool operator==(const BioSpan& o) const {
    return start == o.start && end == o.end && type == o.type;
  }
  bool operator<(const BioSpan& o) const {
    return std::tie(start, end, type) < std::tie(o.start, o.end, o.type);
  }
};

// Plain well-formed BIO reading: B-X opens, I-X of the same type continues.
inline std::vector<BioSpan> bio_spans(const std::vector<std::string>& tags) {
  std::vector<BioSpan> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i].rfind("B-", 0) != 0) {
      ++i;
      continue;
    }
    const std::string type = tags[i].substr(2);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == "I-" + type) ++j;
    spans.push_back({i, j - 1, type});
    i = j;
  }
  return spans;
}

}  // namespace oracle
