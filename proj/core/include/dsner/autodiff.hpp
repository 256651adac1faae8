#pragma once

#include <functional>
#include <vector>

#include "dsner/tensor.hpp"

namespace dsner {

class Graph;

/// Handle to one node of a Graph. Valid only for the graph that created it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

enum class Unary { Sigmoid, Tanh, Exp, Log, Relu };

/// Tape-style reverse-mode autodiff over Tensors. Operations append nodes in
/// topological order; backward() sweeps the tape once in reverse and flushes
/// leaf gradients into the bound parameter tensors. One graph is confined to
/// one thread; a graph is built per forward pass and discarded (or clear()ed)
/// afterwards.
class Graph {
 public:
  /// Constant leaf; gradients are tracked but go nowhere.
  Var input(Tensor value);
  /// Parameter leaf; backward() accumulates into p.grad(). The tensor must
  /// outlive the graph.
  Var param(Tensor& p);
  /// Row-gathered parameter leaf for lookup tables: the node holds only the
  /// selected rows of the 2-D tensor; backward() scatters into p.grad() at
  /// those rows. Far cheaper than param() when p is a large embedding matrix.
  Var param_rows(Tensor& p, const std::vector<std::size_t>& rows);

  Var matmul(Var a, Var b);                 // [m,k] x [k,p] -> [m,p]
  Var matvec(Var m, Var v);                 // [r,c] x [c]   -> [r]
  Var add(Var a, Var b);                    // same shape
  Var sub(Var a, Var b);                    // same shape
  Var mul(Var a, Var b);                    // elementwise, same shape
  Var scale(Var a, double c);
  Var add_rowvec(Var m, Var v);             // m[r][c] + v[c]
  Var add_colvec(Var m, Var v);             // m[r][c] + v[r]
  Var apply(Unary op, Var x);
  Var sigmoid(Var x) { return apply(Unary::Sigmoid, x); }
  Var tanh(Var x) { return apply(Unary::Tanh, x); }
  Var exp(Var x) { return apply(Unary::Exp, x); }
  Var log(Var x) { return apply(Unary::Log, x); }
  Var relu(Var x) { return apply(Unary::Relu, x); }

  /// Max-shifted log-sum-exp reducing `axis`. 1-D with axis 0 gives a scalar;
  /// 2-D gives the vector of reductions over the named axis.
  Var logsumexp(Var x, int axis = 0);
  Var sum(Var x);                           // full reduction -> scalar

  Var concat(const std::vector<Var>& parts);       // 1-D parts -> 1-D
  Var concat_cols(const std::vector<Var>& parts);  // 2-D parts, equal rows
  Var stack_rows(const std::vector<Var>& rows);    // 1-D rows -> [n, d]
  Var slice0(Var x, std::size_t index);            // drop leading axis at index
  Var segment(Var v, std::size_t offset, std::size_t len);  // 1-D window
  Var pick(Var v, std::size_t index);              // 1-D -> scalar
  Var pick2(Var m, std::size_t r, std::size_t c);  // 2-D -> scalar
  Var max_cols(Var m);  // [r,c] -> [c]; ties resolved to the lowest row
  Var mul_mask(Var x, Tensor mask);                // elementwise by a constant

  /// Escape hatch for ops with hand-derived derivatives (the bilinear gather
  /// lives on this). `backward` reads grad_of(self) and scatters to parents.
  Var make_node(Tensor value, std::function<void(Graph&)> backward);

  /// References into the tape are invalidated by the next op call; copy the
  /// tensor when it has to outlive further graph building.
  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  Tensor& grad_of(Var v) { return nodes_[v.id].grad; }
  double scalar(Var v) const;

  /// Reverse sweep from a scalar loss. Node gradients are reset first, so a
  /// repeated call re-accumulates into the bound parameters.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Graph&)> back;  // empty for leaves
    Tensor* bound = nullptr;
  };

  Var push(Tensor value, std::function<void(Graph&)> back, Tensor* bound = nullptr);
  const Tensor& val(int id) const { return nodes_[id].value; }
  Tensor& grd(int id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace dsner
