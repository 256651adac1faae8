#pragma once

#include <functional>
#include <vector>

#include "dsner/autodiff.hpp"

namespace dsner {

/// Builds a scalar expression from parameter leaves bound to `inputs`, in the
/// order given. Called repeatedly at perturbed input values.
using ScalarFn = std::function<Var(Graph&, const std::vector<Var>&)>;

/// Central-difference check of reverse-mode gradients for every element of
/// every input tensor. Returns the worst relative error, with a 1e-8 absolute
/// floor in the denominator. A NaN anywhere in the function output counts as
/// failure and yields +infinity.
double finite_diff_check(const ScalarFn& f, const std::vector<Tensor*>& inputs, double epsilon);

}  // namespace dsner
