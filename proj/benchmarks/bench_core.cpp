#include <benchmark/benchmark.h>

#include <random>

#include "dsner/crf.hpp"
#include "dsner/model.hpp"
#include "dsner/synthetic.hpp"

using namespace dsner;

namespace {

Tensor random_tensor(std::mt19937_64& r, Shape shape) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(r);
  return t;
}

struct Fixture {
  Vocab vocab;
  LabelScheme scheme;
  std::vector<Sentence> sentences;
  NerModel model;

  static Fixture make(int structure, std::size_t layers) {
    std::vector<RawSentence> raw = synthetic_corpus(16, 3);
    for (RawSentence& s : raw) {
      for (std::string& t : s.tokens) t = normalize_digits(t);
      s.labels = to_bioes(s.labels);
    }
    Vocab vocab = Vocab::build(raw, {});
    LabelScheme scheme = LabelScheme::from_types(collect_types(raw));
    ModelConfig cfg;
    cfg.structure = structure;
    cfg.layers = layers;
    cfg.lstm_size = 50;
    cfg.word_dim = 50;
    cfg.char_dim = 15;
    cfg.char_filters = 15;
    cfg.offsets = 3;
    cfg.offset_window = 3;
    NerModel model(cfg, vocab, scheme, 1);
    std::vector<Sentence> sentences = index_corpus(raw, vocab, scheme);
    return Fixture{std::move(vocab), std::move(scheme), std::move(sentences), std::move(model)};
  }
};

}  // namespace

static void BM_MatMul(benchmark::State& state) {
  std::mt19937_64 r(1);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor A = random_tensor(r, {n, n});
  const Tensor B = random_tensor(r, {n, n});
  for (auto _ : state) {
    Graph g;
    Var c = g.matmul(g.input(A), g.input(B));
    benchmark::DoNotOptimize(g.value(c));
  }
  state.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_MatMul)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_BilinearGather(benchmark::State& state) {
  std::mt19937_64 r(2);
  const Tensor H = random_tensor(r, {64, 100});
  for (auto _ : state) {
    Graph g;
    Var Hv = g.input(H);
    Var z = deform_gather(g, Hv, 17, g.input(Tensor::scalar(1.37)));
    benchmark::DoNotOptimize(g.value(z));
  }
}
BENCHMARK(BM_BilinearGather);

static void BM_CrfLogPartition(benchmark::State& state) {
  std::mt19937_64 r(3);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t T = 14;
  Tensor emissions = random_tensor(r, {n, T});
  Tensor trans = random_tensor(r, {T, T});
  Tensor start = random_tensor(r, {T});
  for (auto _ : state) {
    Graph g;
    BoundCrf crf{Var{}, Var{}, g.param(trans), g.param(start), T};
    Var logZ = log_partition(g, g.input(emissions), crf);
    benchmark::DoNotOptimize(g.scalar(logZ));
  }
}
BENCHMARK(BM_CrfLogPartition)->Arg(8)->Arg(32)->Arg(128);

static void BM_Viterbi(benchmark::State& state) {
  std::mt19937_64 r(4);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t T = 14;
  const Tensor emissions = random_tensor(r, {n, T});
  const Tensor trans = random_tensor(r, {T, T});
  const Tensor start = random_tensor(r, {T});
  for (auto _ : state) {
    benchmark::DoNotOptimize(viterbi(emissions, trans, start));
  }
}
BENCHMARK(BM_Viterbi)->Arg(8)->Arg(32)->Arg(128);

static void BM_ForwardVanilla(benchmark::State& state) {
  Fixture f = Fixture::make(0, 2);
  for (auto _ : state) {
    for (const Sentence& s : f.sentences) {
      Graph g;
      auto fwd = f.model.forward(g, s, false, 0.0, nullptr);
      benchmark::DoNotOptimize(g.value(fwd.emissions));
    }
  }
}
BENCHMARK(BM_ForwardVanilla);

static void BM_ForwardDeformable(benchmark::State& state) {
  Fixture f = Fixture::make(3, 2);
  for (auto _ : state) {
    for (const Sentence& s : f.sentences) {
      Graph g;
      auto fwd = f.model.forward(g, s, false, 0.0, nullptr);
      benchmark::DoNotOptimize(g.value(fwd.emissions));
    }
  }
}
BENCHMARK(BM_ForwardDeformable);

static void BM_TrainEpoch(benchmark::State& state) {
  Fixture f = Fixture::make(3, 2);
  TrainConfig tc;
  tc.batch_size = 8;
  tc.dropout = 0.0;
  f.model.train_dropout = 0.0;
  SgdMomentum opt(f.model.parameters(), tc.sgd);
  std::size_t epoch = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_epoch(f.model, f.sentences, tc, opt, epoch++));
  }
}
BENCHMARK(BM_TrainEpoch);

BENCHMARK_MAIN();
