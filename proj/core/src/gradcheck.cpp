#include "dsner/gradcheck.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsner {

namespace {

double evaluate(const ScalarFn& f, const std::vector<Tensor*>& inputs) {
  Graph g;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (Tensor* t : inputs) vars.push_back(g.param(*t));
  Var loss = f(g, vars);
  return g.scalar(loss);
}

}  // namespace

double finite_diff_check(const ScalarFn& f, const std::vector<Tensor*>& inputs, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("finite_diff_check: epsilon must be positive");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Reference pass: analytic gradients of every input element.
  for (Tensor* t : inputs) t->zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Graph g;
    std::vector<Var> vars;
    for (Tensor* t : inputs) vars.push_back(g.param(*t));
    Var loss = f(g, vars);
    if (std::isnan(g.scalar(loss))) return kInf;
    g.backward(loss);
    for (Tensor* t : inputs) analytic.push_back(t->grad());
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    Tensor& t = *inputs[k];
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double saved = t[i];
      t[i] = saved + epsilon;
      const double up = evaluate(f, inputs);
      t[i] = saved - epsilon;
      const double down = evaluate(f, inputs);
      t[i] = saved;
      if (std::isnan(up) || std::isnan(down)) return kInf;
      const double fd = (up - down) / (2.0 * epsilon);
      const double ad = analytic[k][i];
      const double denom = std::max({std::fabs(fd), std::fabs(ad), 1e-8});
      worst = std::max(worst, std::fabs(fd - ad) / denom);
    }
  }
  return worst;
}

}  // namespace dsner
