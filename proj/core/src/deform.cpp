#include "dsner/deform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsner {

std::string offset_mode_name(OffsetMode mode) {
  switch (mode) {
    case OffsetMode::Single: return "single";
    case OffsetMode::Multi: return "multi";
    case OffsetMode::Wide: return "wide";
  }
  return "wide";
}

OffsetMode offset_mode_from_name(const std::string& name) {
  if (name == "single") return OffsetMode::Single;
  if (name == "multi") return OffsetMode::Multi;
  if (name == "wide") return OffsetMode::Wide;
  throw std::invalid_argument("unknown offset mode '" + name + "'");
}

OffsetPredictor OffsetPredictor::create(OffsetMode mode, std::size_t d, std::size_t k,
                                        std::size_t window, Rng& rng) {
  if (k < 1) throw std::invalid_argument("offset predictor: k must be >= 1");
  OffsetPredictor p;
  p.mode = mode;
  switch (mode) {
    case OffsetMode::Single:
      p.k = 1;
      p.window = 1;
      p.weights = normal_init({d}, std::sqrt(2.0 / (1.0 + static_cast<double>(d))), rng);
      break;
    case OffsetMode::Multi:
      p.k = k;
      p.window = 1;
      p.weights = xavier_init({k, d}, rng);
      break;
    case OffsetMode::Wide:
      if (window % 2 == 0 || window < 1)
        throw std::invalid_argument("offset predictor: window must be odd and >= 1");
      p.k = k;
      p.window = window;
      p.weights = xavier_init({window, k, d}, rng);
      break;
  }
  return p;
}

std::vector<double> bilinear_mask(double target, std::size_t n) {
  if (n < 1) throw std::invalid_argument("bilinear_mask: n must be >= 1");
  std::vector<double> mask(n, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double v = 1.0 - std::fabs(target - static_cast<double>(j));
    mask[j - 1] = v > 0.0 ? v : 0.0;
  }
  return mask;
}

Var predict_offset_single(Graph& g, Var h, Var v) {
  const Tensor& hv = g.value(h);
  const Tensor& vv = g.value(v);
  if (hv.ndim() != 1 || vv.ndim() != 1 || hv.numel() != vv.numel()) {
    throw std::invalid_argument("predict_offset_single: shape mismatch " + shape_str(vv.shape()) +
                                " . " + shape_str(hv.shape()));
  }
  return g.sum(g.mul(v, h));
}

Var predict_offsets_multi(Graph& g, Var h, Var V) {
  const Tensor& hv = g.value(h);
  const Tensor& Vv = g.value(V);
  if (Vv.ndim() != 2 || hv.ndim() != 1 || Vv.cols() != hv.numel()) {
    throw std::invalid_argument("predict_offsets_multi: shape mismatch " + shape_str(Vv.shape()) +
                                " x " + shape_str(hv.shape()));
  }
  return g.matvec(V, h);
}

Var predict_offsets_wide(Graph& g, Var H, Var W, std::size_t window) {
  const Tensor& Hv = g.value(H);
  const Tensor& Wv = g.value(W);
  if (Hv.ndim() != 2 || Wv.ndim() != 3 || Wv.dim(0) != window || Wv.dim(2) != Hv.cols()) {
    throw std::invalid_argument("predict_offsets_wide: shape mismatch " + shape_str(Wv.shape()) +
                                " over " + shape_str(Hv.shape()) + " window " +
                                std::to_string(window));
  }
  if (window % 2 == 0) throw std::invalid_argument("predict_offsets_wide: window must be odd");
  const std::size_t n = Hv.rows();
  const std::size_t d = Hv.cols();
  const long pad = static_cast<long>((window - 1) / 2);

  std::vector<Var> taps;
  taps.reserve(window);
  for (std::size_t t = 0; t < window; ++t) taps.push_back(g.slice0(W, t));  // [k, d]

  std::vector<Var> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(g.slice0(H, i));
  const Var zero = g.input(Tensor::zeros({d}));

  std::vector<Var> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Var acc;
    for (std::size_t t = 0; t < window; ++t) {
      const long src = static_cast<long>(i) + static_cast<long>(t) - pad;
      const Var h = (src < 0 || src >= static_cast<long>(n))
                        ? zero
                        : rows[static_cast<std::size_t>(src)];
      Var term = g.matvec(taps[t], h);
      acc = acc.valid() ? g.add(acc, term) : term;
    }
    out.push_back(acc);
  }
  return g.stack_rows(out);
}

namespace {

// Left derivative of the kernel g(t, j) = max(0, 1 - |t - j|) with respect to
// t at u = t - j: +1 on (-1, 0], -1 on (0, 1], 0 elsewhere.
double kernel_left_derivative(double u) {
  if (u > -1.0 && u <= 0.0) return 1.0;
  if (u > 0.0 && u <= 1.0) return -1.0;
  return 0.0;
}

}  // namespace

Var deform_gather(Graph& g, Var H, std::size_t i, Var offset) {
  const Tensor& Hv = g.value(H);
  if (Hv.ndim() != 2) {
    throw std::invalid_argument("deform_gather: need [n, d], got " + shape_str(Hv.shape()));
  }
  const std::size_t n = Hv.rows();
  const std::size_t d = Hv.cols();
  if (i >= n) throw std::out_of_range("deform_gather: position out of range");
  const double o = g.scalar(offset);

  const double raw_target = static_cast<double>(i + 1) + o;  // 1-indexed
  const double target = std::clamp(raw_target, 1.0, static_cast<double>(n));
  const std::vector<double> mask = bilinear_mask(target, n);

  Tensor z({d});
  for (std::size_t j = 0; j < n; ++j) {
    const double w = mask[j];
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < d; ++c) z[c] += w * Hv(j, c);
  }

  const int hid = H.id, oid = offset.id;
  // Left derivative of the clamp: zero once the raw target leaves (1, n].
  const bool clamp_passes = raw_target > 1.0 && raw_target <= static_cast<double>(n);
  const int self = static_cast<int>(g.size());
  return g.make_node(std::move(z), [self, hid, oid, n, d, mask, target, clamp_passes](Graph& gg) {
    const Tensor& dz = gg.grad_of(Var{self});
    const Tensor& Hv = gg.value(Var{hid});
    Tensor& dH = gg.grad_of(Var{hid});
    Tensor& doff = gg.grad_of(Var{oid});
    for (std::size_t j = 0; j < n; ++j) {
      const double w = mask[j];
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) dH(j, c) += w * dz[c];
    }
    if (!clamp_passes) return;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dg = kernel_left_derivative(target - static_cast<double>(j + 1));
      if (dg == 0.0) continue;
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += Hv(j, c) * dz[c];
      acc += dg * dot;
    }
    doff[0] += acc;
  });
}

DeformResult deformable_connect(Graph& g, Var H, OffsetPredictor& predictor) {
  const Tensor& Hv = g.value(H);
  if (Hv.ndim() != 2) {
    throw std::invalid_argument("deformable_connect: need [n, d], got " + shape_str(Hv.shape()));
  }
  const std::size_t n = Hv.rows();
  const std::size_t k = predictor.k;

  Var weights = g.param(predictor.weights);

  // Per-position offset scalars, by mode.
  std::vector<std::vector<Var>> offsets(n, std::vector<Var>(k));
  switch (predictor.mode) {
    case OffsetMode::Single:
      for (std::size_t i = 0; i < n; ++i)
        offsets[i][0] = predict_offset_single(g, g.slice0(H, i), weights);
      break;
    case OffsetMode::Multi:
      for (std::size_t i = 0; i < n; ++i) {
        Var vec = predict_offsets_multi(g, g.slice0(H, i), weights);
        for (std::size_t s = 0; s < k; ++s) offsets[i][s] = g.pick(vec, s);
      }
      break;
    case OffsetMode::Wide: {
      Var field = predict_offsets_wide(g, H, weights, predictor.window);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < k; ++s) offsets[i][s] = g.pick2(field, i, s);
      break;
    }
  }

  OffsetField field({n, k});
  std::vector<Var> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Var> parts;
    parts.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
      field(i, s) = g.scalar(offsets[i][s]);
      parts.push_back(deform_gather(g, H, i, offsets[i][s]));
    }
    rows.push_back(k == 1 ? parts[0] : g.concat(parts));
  }
  return DeformResult{g.stack_rows(rows), std::move(field)};
}

}  // namespace dsner
