#pragma once

#include <string>
#include <vector>

#include "dsner/autodiff.hpp"
#include "dsner/train.hpp"

namespace dsner {

enum class OffsetMode { Single, Multi, Wide };

std::string offset_mode_name(OffsetMode mode);
OffsetMode offset_mode_from_name(const std::string& name);

/// Parameters of one offset-predicting head. Shapes per mode:
///   Single: [d]        one linear functional, k is forced to 1
///   Multi:  [k, d]     k independent linear functionals
///   Wide:   [w, k, d]  width-w convolution over positions (w odd)
struct OffsetPredictor {
  OffsetMode mode = OffsetMode::Wide;
  std::size_t k = 1;
  std::size_t window = 1;
  Tensor weights;

  static OffsetPredictor create(OffsetMode mode, std::size_t d, std::size_t k, std::size_t window,
                                Rng& rng);
};

/// Continuous offsets recorded during a forward pass, one row per position and
/// one column per offset slot.
using OffsetField = Tensor;  // [n, k]

/// g_j = max(0, 1 - |target - j|) over 1-indexed positions j = 1..n, returned
/// as a length-n vector. The caller clamps the target into [1, n] first; the
/// result then has at most two nonzeros which sum to 1.
std::vector<double> bilinear_mask(double target, std::size_t n);

Var predict_offset_single(Graph& g, Var h, Var v);                     // scalar
Var predict_offsets_multi(Graph& g, Var h, Var V);                     // [k]
Var predict_offsets_wide(Graph& g, Var H, Var W, std::size_t window);  // [n, k]

/// Softly reads H at position (i+1) + offset (1-indexed), clamped into [1, n]:
/// z = sum_j g(target, j) * H[j]. Differentiable in H and in the offset; the
/// kernel's integer kinks and the clamp boundaries use the left derivative.
Var deform_gather(Graph& g, Var H, std::size_t i, Var offset);

struct DeformResult {
  Var z;              // [n, k*d]
  OffsetField field;  // [n, k] offset values for analysis
};

/// Predicts k offsets per position from H itself and concatenates the k
/// gathered inputs in slot order.
DeformResult deformable_connect(Graph& g, Var H, OffsetPredictor& predictor);

}  // namespace dsner
