#include "dsner/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace dsner {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Var Graph::push(Tensor value, std::function<void(Graph&)> back, Tensor* bound) {
  Node n;
  n.grad = Tensor::zeros(value.shape());
  n.value = std::move(value);
  n.back = std::move(back);
  n.bound = bound;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::input(Tensor value) { return push(std::move(value), nullptr); }

Var Graph::param(Tensor& p) { return push(p, nullptr, &p); }

Var Graph::param_rows(Tensor& p, const std::vector<std::size_t>& rows) {
  require(p.ndim() == 2, "param_rows: need a 2-D tensor, got " + shape_str(p.shape()));
  const std::size_t d = p.cols();
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < p.rows(), "param_rows: row " + std::to_string(rows[i]) +
                                    " out of range for " + shape_str(p.shape()));
    for (std::size_t j = 0; j < d; ++j) out(i, j) = p(rows[i], j);
  }
  const int self = static_cast<int>(nodes_.size());
  Tensor* bound = &p;
  std::vector<std::size_t> idx = rows;
  return push(std::move(out), [self, bound, idx, d](Graph& g) {
    const Tensor& dout = g.grd(self);
    std::vector<double>& grad = bound->grad();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) grad[idx[i] * d + j] += dout(i, j);
  });
}

double Graph::scalar(Var v) const {
  const Tensor& t = val(v.id);
  require(t.is_scalar(), "scalar: node has shape " + shape_str(t.shape()));
  return t[0];
}

void Graph::clear() { nodes_.clear(); }

void Graph::backward(Var loss) {
  require(loss.valid() && loss.id < static_cast<int>(nodes_.size()), "backward: invalid loss node");
  require(val(loss.id).is_scalar(),
          "backward: loss must be scalar, got shape " + shape_str(val(loss.id).shape()));
  for (Node& n : nodes_) n.grad.fill(0.0);
  grd(loss.id)[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(*this);
  }
  for (Node& n : nodes_) {
    if (!n.bound) continue;
    std::vector<double>& g = n.bound->grad();
    const std::vector<double>& src = n.grad.values();
    for (std::size_t j = 0; j < src.size(); ++j) g[j] += src[j];
  }
}

Var Graph::make_node(Tensor value, std::function<void(Graph&)> backward) {
  return push(std::move(value), std::move(backward));
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& A = val(a.id);
  const Tensor& B = val(b.id);
  require(A.ndim() == 2 && B.ndim() == 2 && A.cols() == B.rows(),
          "matmul: shape mismatch " + shape_str(A.shape()) + " x " + shape_str(B.shape()));
  const std::size_t m = A.rows(), k = A.cols(), p = B.cols();
  Tensor C({m, p});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      const double av = A(i, t);
      for (std::size_t j = 0; j < p; ++j) C(i, j) += av * B(t, j);
    }
  const int self = static_cast<int>(nodes_.size());
  const int ai = a.id, bi = b.id;
  return push(std::move(C), [self, ai, bi, m, k, p](Graph& g) {
    const Tensor& dC = g.grd(self);
    const Tensor& A = g.val(ai);
    const Tensor& B = g.val(bi);
    Tensor& dA = g.grd(ai);
    Tensor& dB = g.grd(bi);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const double d = dC(i, j);
        if (d == 0.0) continue;
        for (std::size_t t = 0; t < k; ++t) {
          dA(i, t) += d * B(t, j);
          dB(t, j) += d * A(i, t);
        }
      }
  });
}

Var Graph::matvec(Var m, Var v) {
  const Tensor& M = val(m.id);
  const Tensor& x = val(v.id);
  require(M.ndim() == 2 && x.ndim() == 1 && M.cols() == x.numel(),
          "matvec: shape mismatch " + shape_str(M.shape()) + " x " + shape_str(x.shape()));
  const std::size_t r = M.rows(), c = M.cols();
  Tensor y({r});
  for (std::size_t i = 0; i < r; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += M(i, j) * x[j];
    y[i] = acc;
  }
  const int self = static_cast<int>(nodes_.size());
  const int mi = m.id, vi = v.id;
  return push(std::move(y), [self, mi, vi, r, c](Graph& g) {
    const Tensor& dy = g.grd(self);
    const Tensor& M = g.val(mi);
    const Tensor& x = g.val(vi);
    Tensor& dM = g.grd(mi);
    Tensor& dx = g.grd(vi);
    for (std::size_t i = 0; i < r; ++i) {
      const double d = dy[i];
      if (d == 0.0) continue;
      for (std::size_t j = 0; j < c; ++j) {
        dM(i, j) += d * x[j];
        dx[j] += d * M(i, j);
      }
    }
  });
}

Var Graph::add(Var a, Var b) {
  const Tensor& A = val(a.id);
  const Tensor& B = val(b.id);
  require(A.same_shape(B),
          "add: shape mismatch " + shape_str(A.shape()) + " vs " + shape_str(B.shape()));
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = A[i] + B[i];
  const int self = static_cast<int>(nodes_.size());
  const int ai = a.id, bi = b.id;
  return push(std::move(out), [self, ai, bi](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dA = g.grd(ai);
    Tensor& dB = g.grd(bi);
    for (std::size_t i = 0; i < d.numel(); ++i) {
      dA[i] += d[i];
      dB[i] += d[i];
    }
  });
}

Var Graph::sub(Var a, Var b) {
  const Tensor& A = val(a.id);
  const Tensor& B = val(b.id);
  require(A.same_shape(B),
          "sub: shape mismatch " + shape_str(A.shape()) + " vs " + shape_str(B.shape()));
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = A[i] - B[i];
  const int self = static_cast<int>(nodes_.size());
  const int ai = a.id, bi = b.id;
  return push(std::move(out), [self, ai, bi](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dA = g.grd(ai);
    Tensor& dB = g.grd(bi);
    for (std::size_t i = 0; i < d.numel(); ++i) {
      dA[i] += d[i];
      dB[i] -= d[i];
    }
  });
}

Var Graph::mul(Var a, Var b) {
  const Tensor& A = val(a.id);
  const Tensor& B = val(b.id);
  require(A.same_shape(B),
          "mul: shape mismatch " + shape_str(A.shape()) + " vs " + shape_str(B.shape()));
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = A[i] * B[i];
  const int self = static_cast<int>(nodes_.size());
  const int ai = a.id, bi = b.id;
  return push(std::move(out), [self, ai, bi](Graph& g) {
    const Tensor& d = g.grd(self);
    const Tensor& A = g.val(ai);
    const Tensor& B = g.val(bi);
    Tensor& dA = g.grd(ai);
    Tensor& dB = g.grd(bi);
    for (std::size_t i = 0; i < d.numel(); ++i) {
      dA[i] += d[i] * B[i];
      dB[i] += d[i] * A[i];
    }
  });
}

Var Graph::scale(Var a, double c) {
  const Tensor& A = val(a.id);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = c * A[i];
  const int self = static_cast<int>(nodes_.size());
  const int ai = a.id;
  return push(std::move(out), [self, ai, c](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dA = g.grd(ai);
    for (std::size_t i = 0; i < d.numel(); ++i) dA[i] += c * d[i];
  });
}

Var Graph::add_rowvec(Var m, Var v) {
  const Tensor& M = val(m.id);
  const Tensor& x = val(v.id);
  require(M.ndim() == 2 && x.ndim() == 1 && M.cols() == x.numel(),
          "add_rowvec: shape mismatch " + shape_str(M.shape()) + " + " + shape_str(x.shape()));
  const std::size_t r = M.rows(), c = M.cols();
  Tensor out({r, c});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = M(i, j) + x[j];
  const int self = static_cast<int>(nodes_.size());
  const int mi = m.id, vi = v.id;
  return push(std::move(out), [self, mi, vi, r, c](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dM = g.grd(mi);
    Tensor& dx = g.grd(vi);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        dM(i, j) += d(i, j);
        dx[j] += d(i, j);
      }
  });
}

Var Graph::add_colvec(Var m, Var v) {
  const Tensor& M = val(m.id);
  const Tensor& x = val(v.id);
  require(M.ndim() == 2 && x.ndim() == 1 && M.rows() == x.numel(),
          "add_colvec: shape mismatch " + shape_str(M.shape()) + " + " + shape_str(x.shape()));
  const std::size_t r = M.rows(), c = M.cols();
  Tensor out({r, c});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = M(i, j) + x[i];
  const int self = static_cast<int>(nodes_.size());
  const int mi = m.id, vi = v.id;
  return push(std::move(out), [self, mi, vi, r, c](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dM = g.grd(mi);
    Tensor& dx = g.grd(vi);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        dM(i, j) += d(i, j);
        dx[i] += d(i, j);
      }
  });
}

Var Graph::apply(Unary op, Var x) {
  const Tensor& X = val(x.id);
  Tensor out(X.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) {
    const double v = X[i];
    switch (op) {
      case Unary::Sigmoid:
        out[i] = 1.0 / (1.0 + std::exp(-v));
        break;
      case Unary::Tanh:
        out[i] = std::tanh(v);
        break;
      case Unary::Exp:
        out[i] = std::exp(v);
        break;
      case Unary::Log:
        if (v <= 0.0)
          throw std::domain_error("log: non-positive input " + std::to_string(v));
        out[i] = std::log(v);
        break;
      case Unary::Relu:
        out[i] = v > 0.0 ? v : 0.0;
        break;
    }
  }
  const int self = static_cast<int>(nodes_.size());
  const int xi = x.id;
  return push(std::move(out), [self, xi, op](Graph& g) {
    const Tensor& d = g.grd(self);
    const Tensor& y = g.val(self);
    const Tensor& X = g.val(xi);
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < d.numel(); ++i) {
      double local = 0.0;
      switch (op) {
        case Unary::Sigmoid:
          local = y[i] * (1.0 - y[i]);
          break;
        case Unary::Tanh:
          local = 1.0 - y[i] * y[i];
          break;
        case Unary::Exp:
          local = y[i];
          break;
        case Unary::Log:
          local = 1.0 / X[i];
          break;
        case Unary::Relu:
          local = X[i] > 0.0 ? 1.0 : 0.0;  // left subgradient at the kink
          break;
      }
      dx[i] += d[i] * local;
    }
  });
}

namespace {

// Stable log-sum-exp of a strided slice; writes softmax weights if asked.
double lse_slice(const std::vector<double>& v, std::size_t begin, std::size_t stride,
                 std::size_t count) {
  double mx = v[begin];
  for (std::size_t i = 1; i < count; ++i) mx = std::max(mx, v[begin + i * stride]);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += std::exp(v[begin + i * stride] - mx);
  return mx + std::log(acc);
}

}  // namespace

Var Graph::logsumexp(Var x, int axis) {
  const Tensor& X = val(x.id);
  const int xi = x.id;
  if (X.ndim() == 1) {
    require(axis == 0, "logsumexp: axis " + std::to_string(axis) + " out of bounds for 1-D");
    const std::size_t n = X.numel();
    Tensor out = Tensor::scalar(lse_slice(X.values(), 0, 1, n));
    const int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [self, xi, n](Graph& g) {
      const double d = g.grd(self)[0];
      const double lse = g.val(self)[0];
      const Tensor& X = g.val(xi);
      Tensor& dx = g.grd(xi);
      for (std::size_t i = 0; i < n; ++i) dx[i] += d * std::exp(X[i] - lse);
    });
  }
  require(X.ndim() == 2 && (axis == 0 || axis == 1),
          "logsumexp: axis " + std::to_string(axis) + " invalid for shape " + shape_str(X.shape()));
  const std::size_t r = X.rows(), c = X.cols();
  if (axis == 0) {
    Tensor out({c});
    for (std::size_t j = 0; j < c; ++j) out[j] = lse_slice(X.values(), j, c, r);
    const int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [self, xi, r, c](Graph& g) {
      const Tensor& d = g.grd(self);
      const Tensor& lse = g.val(self);
      const Tensor& X = g.val(xi);
      Tensor& dx = g.grd(xi);
      for (std::size_t j = 0; j < c; ++j) {
        if (d[j] == 0.0) continue;
        for (std::size_t i = 0; i < r; ++i) dx(i, j) += d[j] * std::exp(X(i, j) - lse[j]);
      }
    });
  }
  Tensor out({r});
  for (std::size_t i = 0; i < r; ++i) out[i] = lse_slice(X.values(), i * c, 1, c);
  const int self = static_cast<int>(nodes_.size());
  return push(std::move(out), [self, xi, r, c](Graph& g) {
    const Tensor& d = g.grd(self);
    const Tensor& lse = g.val(self);
    const Tensor& X = g.val(xi);
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < r; ++i) {
      if (d[i] == 0.0) continue;
      for (std::size_t j = 0; j < c; ++j) dx(i, j) += d[i] * std::exp(X(i, j) - lse[i]);
    }
  });
}

Var Graph::sum(Var x) {
  const Tensor& X = val(x.id);
  double acc = 0.0;
  for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i];
  const int self = static_cast<int>(nodes_.size());
  const int xi = x.id;
  return push(Tensor::scalar(acc), [self, xi](Graph& g) {
    const double d = g.grd(self)[0];
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] += d;
  });
}

Var Graph::concat(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat: no parts");
  std::size_t total = 0;
  for (Var p : parts) {
    require(val(p.id).ndim() == 1, "concat: parts must be 1-D");
    total += val(p.id).numel();
  }
  Tensor out({total});
  std::size_t at = 0;
  std::vector<int> ids;
  std::vector<std::size_t> offs;
  for (Var p : parts) {
    const Tensor& t = val(p.id);
    ids.push_back(p.id);
    offs.push_back(at);
    for (std::size_t i = 0; i < t.numel(); ++i) out[at + i] = t[i];
    at += t.numel();
  }
  const int self = static_cast<int>(nodes_.size());
  return push(std::move(out), [self, ids, offs](Graph& g) {
    const Tensor& d = g.grd(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor& dp = g.grd(ids[k]);
      for (std::size_t i = 0; i < dp.numel(); ++i) dp[i] += d[offs[k] + i];
    }
  });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols: no parts");
  const std::size_t r = val(parts[0].id).rows();
  std::size_t total = 0;
  for (Var p : parts) {
    const Tensor& t = val(p.id);
    require(t.ndim() == 2 && t.rows() == r, "concat_cols: row mismatch at " + shape_str(t.shape()));
    total += t.cols();
  }
  Tensor out({r, total});
  std::vector<int> ids;
  std::vector<std::size_t> offs, widths;
  std::size_t at = 0;
  for (Var p : parts) {
    const Tensor& t = val(p.id);
    ids.push_back(p.id);
    offs.push_back(at);
    widths.push_back(t.cols());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < t.cols(); ++j) out(i, at + j) = t(i, j);
    at += t.cols();
  }
  const int self = static_cast<int>(nodes_.size());
  return push(std::move(out), [self, ids, offs, widths, r](Graph& g) {
    const Tensor& d = g.grd(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor& dp = g.grd(ids[k]);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < widths[k]; ++j) dp(i, j) += d(i, offs[k] + j);
    }
  });
}

Var Graph::stack_rows(const std::vector<Var>& rows) {
  require(!rows.empty(), "stack_rows: no rows");
  const std::size_t d = val(rows[0].id).numel();
  std::vector<int> ids;
  for (Var rv : rows) {
    const Tensor& t = val(rv.id);
    require(t.ndim() == 1 && t.numel() == d, "stack_rows: width mismatch at " + shape_str(t.shape()));
    ids.push_back(rv.id);
  }
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor& t = val(ids[i]);
    for (std::size_t j = 0; j < d; ++j) out(i, j) = t[j];
  }
  const int self = static_cast<int>(nodes_.size());
  return push(std::move(out), [self, ids, d](Graph& g) {
    const Tensor& dout = g.grd(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Tensor& dr = g.grd(ids[i]);
      for (std::size_t j = 0; j < d; ++j) dr[j] += dout(i, j);
    }
  });
}

Var Graph::slice0(Var x, std::size_t index) {
  const Tensor& X = val(x.id);
  require(X.ndim() >= 2, "slice0: need at least 2 dims, got " + shape_str(X.shape()));
  require(index < X.dim(0), "slice0: index " + std::to_string(index) + " out of range for " +
                                shape_str(X.shape()));
  Shape sub(X.shape().begin() + 1, X.shape().end());
  std::size_t block = 1;
  for (std::size_t d : sub) block *= d;
  Tensor out(sub);
  const std::size_t base = index * block;
  for (std::size_t i = 0; i < block; ++i) out[i] = X[base + i];
  const int self = static_cast<int>(nodes_.size());
  const int xi = x.id;
  return push(std::move(out), [self, xi, base, block](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < block; ++i) dx[base + i] += d[i];
  });
}

Var Graph::segment(Var v, std::size_t offset, std::size_t len) {
  const Tensor& X = val(v.id);
  require(X.ndim() == 1 && offset + len <= X.numel(),
          "segment: window [" + std::to_string(offset) + "," + std::to_string(offset + len) +
              ") out of range for " + shape_str(X.shape()));
  Tensor out({len});
  for (std::size_t i = 0; i < len; ++i) out[i] = X[offset + i];
  const int self = static_cast<int>(nodes_.size());
  const int xi = v.id;
  return push(std::move(out), [self, xi, offset, len](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < len; ++i) dx[offset + i] += d[i];
  });
}

Var Graph::pick(Var v, std::size_t index) {
  const Tensor& X = val(v.id);
  require(X.ndim() == 1 && index < X.numel(),
          "pick: index " + std::to_string(index) + " out of range for " + shape_str(X.shape()));
  const int self = static_cast<int>(nodes_.size());
  const int xi = v.id;
  return push(Tensor::scalar(X[index]), [self, xi, index](Graph& g) {
    g.grd(xi)[index] += g.grd(self)[0];
  });
}

Var Graph::pick2(Var m, std::size_t r, std::size_t c) {
  const Tensor& X = val(m.id);
  require(X.ndim() == 2 && r < X.rows() && c < X.cols(),
          "pick2: (" + std::to_string(r) + "," + std::to_string(c) + ") out of range for " +
              shape_str(X.shape()));
  const std::size_t flat = r * X.cols() + c;
  const int self = static_cast<int>(nodes_.size());
  const int xi = m.id;
  return push(Tensor::scalar(X[flat]), [self, xi, flat](Graph& g) {
    g.grd(xi)[flat] += g.grd(self)[0];
  });
}

Var Graph::max_cols(Var m) {
  const Tensor& X = val(m.id);
  require(X.ndim() == 2, "max_cols: need 2-D, got " + shape_str(X.shape()));
  const std::size_t r = X.rows(), c = X.cols();
  Tensor out({c});
  std::vector<std::size_t> arg(c, 0);
  for (std::size_t j = 0; j < c; ++j) {
    double best = X(0, j);
    std::size_t bi = 0;
    for (std::size_t i = 1; i < r; ++i) {
      if (X(i, j) > best) {
        best = X(i, j);
        bi = i;
      }
    }
    out[j] = best;
    arg[j] = bi;
  }
  const int self = static_cast<int>(nodes_.size());
  const int xi = m.id;
  return push(std::move(out), [self, xi, arg, c](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dx = g.grd(xi);
    for (std::size_t j = 0; j < c; ++j) dx(arg[j], j) += d[j];
  });
}

Var Graph::mul_mask(Var x, Tensor mask) {
  const Tensor& X = val(x.id);
  require(X.same_shape(mask),
          "mul_mask: shape mismatch " + shape_str(X.shape()) + " vs " + shape_str(mask.shape()));
  Tensor out(X.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = X[i] * mask[i];
  const int self = static_cast<int>(nodes_.size());
  const int xi = x.id;
  auto m = std::make_shared<Tensor>(std::move(mask));
  return push(std::move(out), [self, xi, m](Graph& g) {
    const Tensor& d = g.grd(self);
    Tensor& dx = g.grd(xi);
    for (std::size_t i = 0; i < d.numel(); ++i) dx[i] += d[i] * (*m)[i];
  });
}

}  // namespace dsner
