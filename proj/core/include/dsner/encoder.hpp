#pragma once

#include <vector>

#include "dsner/autodiff.hpp"
#include "dsner/train.hpp"

namespace dsner {

/// One LSTM direction. Gate blocks are stacked row-wise in [i; f; o; g]
/// order, so W is [4*d_h, d_in], U is [4*d_h, d_h] and b is [4*d_h].
struct LstmParams {
  Tensor W, U, b;
  std::size_t d_in = 0, d_h = 0;

  static LstmParams create(std::size_t d_in, std::size_t d_h, Rng& rng);
};

struct BoundLstm {
  Var W, U, b;
  std::size_t d_in = 0, d_h = 0;
};
BoundLstm bind(Graph& g, LstmParams& p);

struct LstmState {
  Var h, c;
};

/// Standard cell: i,f,o = sigmoid, g = tanh, c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_step(Graph& g, const BoundLstm& p, Var x, LstmState prev);

struct BiLstmParams {
  LstmParams fwd, bwd;
  static BiLstmParams create(std::size_t d_in, std::size_t d_h, Rng& rng);
};

/// Runs both directions from zero states and concatenates per position:
/// [n, d_in] -> [n, 2*d_h].
Var bilstm_forward(Graph& g, Var inputs, BiLstmParams& params);

/// Vanilla stacking: layer l+1 position i reads layer l position i.
Var vanilla_stack(Graph& g, std::vector<BiLstmParams>& layers, Var inputs);

}  // namespace dsner
