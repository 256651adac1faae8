#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsner/autodiff.hpp"
#include "dsner/gradcheck.hpp"
#include "oracles.hpp"

using namespace dsner;

TEST_CASE("matmul identity and hand cases") {
  Graph g;
  Var I = g.input(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  Var B = g.input(Tensor::matrix(2, 2, {3, 4, 5, 6}));
  const Tensor& C = g.value(g.matmul(I, B));
  CHECK(C(0, 0) == 3);
  CHECK(C(0, 1) == 4);
  CHECK(C(1, 0) == 5);
  CHECK(C(1, 1) == 6);

  Var a = g.input(Tensor::matrix(1, 2, {1, 2}));
  Var b = g.input(Tensor::matrix(2, 1, {3, 4}));
  CHECK(g.value(g.matmul(a, b))[0] == 11);
}

TEST_CASE("matmul matches the triple-loop oracle") {
  auto r = oracle::rng(11);
  const Tensor A = oracle::random_tensor(r, {4, 3}, -10.0, 10.0);
  const Tensor B = oracle::random_tensor(r, {3, 5}, -10.0, 10.0);
  Graph g;
  const Tensor& C = g.value(g.matmul(g.input(A), g.input(B)));
  const Tensor want = oracle::triple_loop_matmul(A, B);
  for (std::size_t i = 0; i < C.numel(); ++i) CHECK(std::fabs(C[i] - want[i]) < 1e-12);
}

TEST_CASE("matmul rejects mismatched shapes with both named") {
  Graph g;
  Var a = g.input(Tensor::zeros({2, 3}));
  Var b = g.input(Tensor::zeros({4, 5}));
  CHECK_THROWS_WITH_AS(g.matmul(a, b), doctest::Contains("[2,3]"), std::invalid_argument);
  try {
    g.matmul(a, b);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("[4,5]") != std::string::npos);
  }
}

TEST_CASE("elementwise basics") {
  Graph g;
  CHECK(g.value(g.tanh(g.input(Tensor::scalar(0.0))))[0] == 0.0);
  CHECK(g.value(g.sigmoid(g.input(Tensor::scalar(0.0))))[0] == 0.5);
  CHECK_THROWS_AS(g.log(g.input(Tensor::scalar(-1.0))), std::domain_error);
  CHECK_THROWS_AS(g.log(g.input(Tensor::scalar(0.0))), std::domain_error);
}

TEST_CASE("tanh derivative matches a central difference at 0.3") {
  Tensor x = Tensor::scalar(0.3);
  Graph g;
  Var xv = g.param(x);
  g.backward(g.tanh(xv));
  const double ad = x.grad()[0];
  const double eps = 1e-6;
  const double fd = (std::tanh(0.3 + eps) - std::tanh(0.3 - eps)) / (2 * eps);
  CHECK(std::fabs(ad - fd) < 1e-7);
}

TEST_CASE("logsumexp hand cases and stability") {
  Graph g;
  CHECK(g.value(g.logsumexp(g.input(Tensor::vector({0, 0}))))[0] == doctest::Approx(std::log(2.0)));
  const double big = g.value(g.logsumexp(g.input(Tensor::vector({1000, 1000}))))[0];
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("logsumexp matches the naive oracle at moderate magnitude") {
  auto r = oracle::rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(6);
    for (double& x : v) x = oracle::uniform(r, -5.0, 5.0);
    Graph g;
    const double got = g.value(g.logsumexp(g.input(Tensor::vector(v))))[0];
    CHECK(std::fabs(got - oracle::naive_logsumexp(v)) < 1e-12);
  }
}

TEST_CASE("logsumexp bounds: max <= lse <= max + log count") {
  auto r = oracle::rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(oracle::uniform(r, 0, 8));
    std::vector<double> v(n);
    for (double& x : v) x = oracle::uniform(r, -50.0, 50.0);
    Graph g;
    const double lse = g.value(g.logsumexp(g.input(Tensor::vector(v))))[0];
    const double mx = *std::max_element(v.begin(), v.end());
    CHECK(lse >= mx);
    CHECK(lse <= mx + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("logsumexp reduces 2-D axes") {
  Graph g;
  Var m = g.input(Tensor::matrix(2, 3, {0, 0, 0, 0, 0, 0}));
  const Tensor& cols = g.value(g.logsumexp(m, 0));
  REQUIRE(cols.numel() == 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(cols[j] == doctest::Approx(std::log(2.0)));
  const Tensor& rows = g.value(g.logsumexp(m, 1));
  REQUIRE(rows.numel() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(rows[i] == doctest::Approx(std::log(3.0)));
}

TEST_CASE("backward of sum gives all-ones") {
  auto r = oracle::rng(14);
  Tensor A = oracle::random_tensor(r, {3, 4});
  Graph g;
  Var a = g.param(A);
  g.backward(g.sum(a));
  for (double v : A.grad()) CHECK(v == 1.0);
}

TEST_CASE("backward through an elementwise product is the product rule") {
  auto r = oracle::rng(15);
  Tensor A = oracle::random_tensor(r, {5});
  Tensor B = oracle::random_tensor(r, {5});
  Graph g;
  Var a = g.param(A);
  Var b = g.param(B);
  g.backward(g.sum(g.mul(a, b)));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(A.grad()[i] == B[i]);
    CHECK(B.grad()[i] == A[i]);
  }
}

TEST_CASE("backward rejects a non-scalar loss") {
  Graph g;
  Var a = g.input(Tensor::zeros({3}));
  CHECK_THROWS_AS(g.backward(a), std::invalid_argument);
}

TEST_CASE("repeated backward accumulates into parameters") {
  Tensor A = Tensor::vector({1.0, 2.0});
  Graph g;
  Var a = g.param(A);
  Var loss = g.sum(a);
  g.backward(loss);
  g.backward(loss);
  CHECK(A.grad()[0] == 2.0);
  CHECK(A.grad()[1] == 2.0);
}

TEST_CASE("backward is linear in the loss") {
  auto r = oracle::rng(16);
  const Tensor X0 = oracle::random_tensor(r, {4});
  const Tensor W0 = oracle::random_tensor(r, {3, 4});
  for (double alpha : {2.0, -1.0}) {
    Tensor x = X0, w = W0;
    Graph g;
    Var loss = g.sum(g.tanh(g.matvec(g.param(w), g.param(x))));
    g.backward(loss);
    const std::vector<double> base_x = x.grad(), base_w = w.grad();

    Tensor x2 = X0, w2 = W0;
    Graph g2;
    Var loss2 = g2.scale(g2.sum(g2.tanh(g2.matvec(g2.param(w2), g2.param(x2)))), alpha);
    g2.backward(loss2);
    for (std::size_t i = 0; i < base_x.size(); ++i)
      CHECK(x2.grad()[i] == doctest::Approx(alpha * base_x[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < base_w.size(); ++i)
      CHECK(w2.grad()[i] == doctest::Approx(alpha * base_w[i]).epsilon(1e-12));
  }
}

TEST_CASE("finite_diff_check is near-exact for a linear function") {
  auto r = oracle::rng(17);
  Tensor x = oracle::random_tensor(r, {4});
  const double err = finite_diff_check(
      [](Graph& g, const std::vector<Var>& in) { return g.scale(g.sum(in[0]), 3.0); }, {&x}, 1e-4);
  CHECK(err < 1e-10);
}

TEST_CASE("finite_diff_check on a tanh composition") {
  auto r = oracle::rng(18);
  Tensor x = oracle::random_tensor(r, {3});
  Tensor w = oracle::random_tensor(r, {3, 3});
  const double err = finite_diff_check(
      [](Graph& g, const std::vector<Var>& in) {
        return g.sum(g.tanh(g.matvec(in[1], g.tanh(in[0]))));
      },
      {&x, &w}, 1e-4);
  CHECK(err < 1e-5);
}

TEST_CASE("finite_diff_check reports NaN as failure") {
  Tensor x = Tensor::scalar(-2.0);
  const double err = finite_diff_check(
      [](Graph& g, const std::vector<Var>& in) {
        // sqrt of a negative via exp(0.5*log(x)) would throw; craft NaN with 0/0
        Var z = g.sub(in[0], in[0]);
        Var ratio = g.make_node(Tensor::scalar(0.0 / 0.0), [](Graph&) {});
        return g.add(g.sum(z), ratio);
      },
      {&x}, 1e-4);
  CHECK(std::isinf(err));
}

TEST_CASE("every registered op passes a gradient check on random inputs") {
  auto r = oracle::rng(19);
  Tensor a = oracle::random_tensor(r, {3, 4});
  Tensor b = oracle::random_tensor(r, {4, 2});
  Tensor v = oracle::random_tensor(r, {2});
  Tensor u = oracle::random_tensor(r, {3});
  Tensor w = oracle::random_tensor(r, {5}, 0.5, 2.0);  // positive, for log

  const double err = finite_diff_check(
      [](Graph& g, const std::vector<Var>& in) {
        Var prod = g.matmul(in[0], in[1]);               // matmul
        Var shifted = g.add_rowvec(prod, in[2]);         // add_rowvec
        Var shifted2 = g.add_colvec(shifted, in[3]);     // add_colvec
        Var s1 = g.logsumexp(shifted2, 0);               // lse axis 0
        Var s2 = g.logsumexp(shifted2, 1);               // lse axis 1
        Var mixed = g.concat({s1, s2});                  // concat
        Var seg = g.segment(mixed, 1, 2);                // segment
        Var act = g.mul(g.sigmoid(seg), g.relu(seg));    // sigmoid, relu, mul
        Var logs = g.sum(g.log(in[4]));                  // log
        Var expd = g.sum(g.exp(g.scale(seg, 0.1)));      // exp, scale
        Var row = g.slice0(shifted2, 1);                 // slice0
        Var top = g.max_cols(g.stack_rows({row, seg}));  // stack_rows, max_cols
        Var masked = g.mul_mask(top, Tensor::vector({0.5, 2.0}));  // mul_mask
        Var p = g.add(g.pick(masked, 0), g.pick2(shifted2, 2, 1));  // pick, pick2
        return g.add(g.add(g.sum(act), g.sub(logs, expd)), p);
      },
      {&a, &b, &v, &u, &w}, 1e-4);
  CHECK(err < 1e-4);
}

TEST_CASE("composite LSTM-style expression matches finite differences") {
  auto r = oracle::rng(20);
  Tensor W = oracle::random_tensor(r, {8, 3});
  Tensor U = oracle::random_tensor(r, {8, 2});
  Tensor b = oracle::random_tensor(r, {8});
  Tensor x = oracle::random_tensor(r, {3});
  Tensor h = oracle::random_tensor(r, {2});
  Tensor c = oracle::random_tensor(r, {2});
  const double err = finite_diff_check(
      [](Graph& g, const std::vector<Var>& in) {
        Var pre = g.add(g.add(g.matvec(in[0], in[3]), g.matvec(in[1], in[4])), in[2]);
        Var gi = g.sigmoid(g.segment(pre, 0, 2));
        Var gf = g.sigmoid(g.segment(pre, 2, 2));
        Var go = g.sigmoid(g.segment(pre, 4, 2));
        Var gg = g.tanh(g.segment(pre, 6, 2));
        Var cc = g.add(g.mul(gf, in[5]), g.mul(gi, gg));
        Var hh = g.mul(go, g.tanh(cc));
        return g.add(g.sum(hh), g.sum(cc));
      },
      {&W, &U, &b, &x, &h, &c}, 1e-4);
  CHECK(err < 1e-4);
}

TEST_CASE("row-gathered parameters scatter gradients back, repeats accumulating") {
  Tensor table = Tensor::matrix(4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
  table.zero_grad();
  Graph g;
  Var rows = g.param_rows(table, {2, 0, 2});
  const Tensor& v = g.value(rows);
  CHECK(v(0, 0) == 5);
  CHECK(v(1, 0) == 1);
  CHECK(v(2, 1) == 6);
  g.backward(g.sum(rows));
  CHECK(table.grad()[0 * 2 + 0] == 1.0);  // row 0 used once
  CHECK(table.grad()[2 * 2 + 0] == 2.0);  // row 2 used twice
  CHECK(table.grad()[1 * 2 + 0] == 0.0);  // row 1 untouched
  CHECK(table.grad()[3 * 2 + 1] == 0.0);

  Tensor t2 = Tensor::matrix(3, 2, {0.1, 0.5, -0.2, 0.4, 0.3, -0.7});
  const double err = finite_diff_check(
      [&t2](Graph& gg, const std::vector<Var>&) {
        Var rows = gg.param_rows(t2, {1, 2, 1});
        return gg.sum(gg.tanh(rows));
      },
      {&t2}, 1e-4);
  CHECK(err < 1e-4);
}

TEST_CASE("forward results stay finite on finite inputs") {
  auto r = oracle::rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g;
    Var a = g.input(oracle::random_tensor(r, {4, 4}, -3, 3));
    Var out = g.logsumexp(g.tanh(g.matmul(a, a)), 1);
    CHECK(g.value(out).all_finite());
  }
}
