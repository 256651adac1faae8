#include "dsner/encoder.hpp"

#include <stdexcept>

namespace dsner {

LstmParams LstmParams::create(std::size_t d_in, std::size_t d_h, Rng& rng) {
  LstmParams p;
  p.W = xavier_init({4 * d_h, d_in}, rng);
  p.U = xavier_init({4 * d_h, d_h}, rng);
  p.b = Tensor::zeros({4 * d_h});
  p.d_in = d_in;
  p.d_h = d_h;
  return p;
}

BoundLstm bind(Graph& g, LstmParams& p) {
  return BoundLstm{g.param(p.W), g.param(p.U), g.param(p.b), p.d_in, p.d_h};
}

LstmState lstm_step(Graph& g, const BoundLstm& p, Var x, LstmState prev) {
  if (g.value(x).numel() != p.d_in) {
    throw std::invalid_argument("lstm_step: input shape " + shape_str(g.value(x).shape()) +
                                " does not match d_in " + std::to_string(p.d_in));
  }
  Var pre = g.add(g.add(g.matvec(p.W, x), g.matvec(p.U, prev.h)), p.b);
  const std::size_t d = p.d_h;
  Var gi = g.sigmoid(g.segment(pre, 0, d));
  Var gf = g.sigmoid(g.segment(pre, d, d));
  Var go = g.sigmoid(g.segment(pre, 2 * d, d));
  Var gg = g.tanh(g.segment(pre, 3 * d, d));
  Var c = g.add(g.mul(gf, prev.c), g.mul(gi, gg));
  Var h = g.mul(go, g.tanh(c));
  return {h, c};
}

BiLstmParams BiLstmParams::create(std::size_t d_in, std::size_t d_h, Rng& rng) {
  // Orientations hold independent parameters.
  BiLstmParams p;
  p.fwd = LstmParams::create(d_in, d_h, rng);
  p.bwd = LstmParams::create(d_in, d_h, rng);
  return p;
}

Var bilstm_forward(Graph& g, Var inputs, BiLstmParams& params) {
  const Tensor& X = g.value(inputs);
  if (X.ndim() != 2) {
    throw std::invalid_argument("bilstm_forward: need [n, d_in], got " + shape_str(X.shape()));
  }
  const std::size_t n = X.rows();
  const std::size_t d_h = params.fwd.d_h;

  BoundLstm fwd = bind(g, params.fwd);
  BoundLstm bwd = bind(g, params.bwd);

  std::vector<Var> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(g.slice0(inputs, i));

  std::vector<Var> hf(n), hb(n);
  LstmState state{g.input(Tensor::zeros({d_h})), g.input(Tensor::zeros({d_h}))};
  for (std::size_t i = 0; i < n; ++i) {
    state = lstm_step(g, fwd, rows[i], state);
    hf[i] = state.h;
  }
  state = LstmState{g.input(Tensor::zeros({d_h})), g.input(Tensor::zeros({d_h}))};
  for (std::size_t i = n; i-- > 0;) {
    state = lstm_step(g, bwd, rows[i], state);
    hb[i] = state.h;
  }

  std::vector<Var> merged;
  merged.reserve(n);
  for (std::size_t i = 0; i < n; ++i) merged.push_back(g.concat({hf[i], hb[i]}));
  return g.stack_rows(merged);
}

Var vanilla_stack(Graph& g, std::vector<BiLstmParams>& layers, Var inputs) {
  if (layers.empty()) throw std::invalid_argument("vanilla_stack: no layers");
  Var cur = inputs;
  for (BiLstmParams& layer : layers) cur = bilstm_forward(g, cur, layer);
  return cur;
}

}  // namespace dsner
