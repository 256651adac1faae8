#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsner/eval.hpp"
#include "oracles.hpp"

using namespace dsner;

TEST_CASE("extract_spans hand cases") {
  CHECK(extract_spans({"B-PER", "E-PER", "O"}) == std::vector<Span>{{0, 1, "PER"}});
  CHECK(extract_spans({"S-LOC", "S-LOC"}) == std::vector<Span>{{0, 0, "LOC"}, {1, 1, "LOC"}});
  CHECK(extract_spans({"O", "O"}).empty());
}

TEST_CASE("malformed sequences repair deterministically") {
  struct Case {
    std::vector<std::string> tags;
    std::vector<Span> want;
  };
  const Case cases[] = {
      // type comes from the opening tag
      {{"B-PER", "I-ORG", "E-PER"}, {{0, 2, "PER"}}},
      {{"B-PER", "I-ORG", "E-ORG"}, {{0, 2, "PER"}}},
      // dangling I opens a run
      {{"O", "I-ORG", "E-ORG"}, {{1, 2, "ORG"}}},
      {{"I-LOC"}, {{0, 0, "LOC"}}},
      // dangling E is a singleton
      {{"O", "E-PER"}, {{1, 1, "PER"}}},
      // a run left open still counts
      {{"B-PER", "I-PER"}, {{0, 1, "PER"}}},
      {{"B-PER"}, {{0, 0, "PER"}}},
      // B inside a run closes the previous one
      {{"B-PER", "B-LOC", "E-LOC"}, {{0, 0, "PER"}, {1, 2, "LOC"}}},
      // S inside a run closes the previous one
      {{"B-PER", "S-LOC"}, {{0, 0, "PER"}, {1, 1, "LOC"}}},
      // O cuts a run short
      {{"B-PER", "O", "E-PER"}, {{0, 0, "PER"}, {2, 2, "PER"}}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.tags);
    CHECK(extract_spans(c.tags) == c.want);
  }
}

TEST_CASE("encode then extract is the identity on valid span sets") {
  auto r = oracle::rng(110);
  const std::vector<std::string> types{"PER", "LOC", "ORG"};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + r() % 12;
    std::vector<Span> spans;
    std::size_t i = 0;
    while (i < n) {
      if (r() % 2) {
        const std::size_t len = 1 + r() % std::min<std::size_t>(4, n - i);
        spans.push_back({i, i + len - 1, types[r() % 3]});
        i += len;
      } else {
        ++i;
      }
    }
    const std::vector<Span> got = extract_spans(encode_bioes(spans, n));
    CHECK(got == spans);
  }
}

TEST_CASE("prf1 basics") {
  const std::vector<Span> gold{{0, 1, "PER"}, {3, 3, "LOC"}};
  SUBCASE("perfect predictions") {
    const Metrics m = prf1({gold}, {gold});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }
  SUBCASE("one hit, one miss, one spurious") {
    const std::vector<Span> pred{{0, 1, "PER"}, {5, 5, "ORG"}};
    const Metrics m = prf1({gold}, {pred});
    CHECK(m.precision == 0.5);
    CHECK(m.recall == 0.5);
    CHECK(m.f1 == 0.5);
  }
  SUBCASE("empty predictions give zeros") {
    const Metrics m = prf1({gold}, {{}});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
  }
  SUBCASE("matching spans in different sentences do not count") {
    const Metrics m = prf1({gold, {}}, {{}, gold});
    CHECK(m.tp == 0);
    CHECK(m.fp == 2);
    CHECK(m.fn == 2);
  }
}

TEST_CASE("swapping gold and predictions exchanges precision and recall") {
  auto r = oracle::rng(111);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Span> a, b;
    for (std::size_t i = 0; i < 6; ++i) {
      if (r() % 2) a.push_back({i * 3, i * 3 + r() % 2, "T"});
      if (r() % 2) b.push_back({i * 3, i * 3 + r() % 2, "T"});
    }
    const Metrics ab = prf1({a}, {b});
    const Metrics ba = prf1({b}, {a});
    CHECK(ab.precision == ba.recall);
    CHECK(ab.recall == ba.precision);
    CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-15));
  }
}

TEST_CASE("f1 lies between min and max of P and R when both are positive") {
  auto r = oracle::rng(112);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Span> gold, pred;
    for (std::size_t i = 0; i < 8; ++i) {
      if (r() % 3) gold.push_back({i * 4, i * 4 + r() % 3, "T"});
      if (r() % 3) pred.push_back({i * 4, i * 4 + r() % 3, "T"});
    }
    const Metrics m = prf1({gold}, {pred});
    if (m.precision > 0.0 && m.recall > 0.0) {
      CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
      CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
    }
  }
}

TEST_CASE("per-type counts are reported alongside the overall row") {
  const std::vector<Span> gold{{0, 0, "PER"}, {2, 2, "LOC"}};
  const std::vector<Span> pred{{0, 0, "PER"}, {2, 2, "ORG"}};
  const Metrics m = prf1({gold}, {pred});
  CHECK(m.per_type.at("PER").tp == 1);
  CHECK(m.per_type.at("LOC").fn == 1);
  CHECK(m.per_type.at("ORG").fp == 1);
  const std::string report = metrics_report(m);
  CHECK(report.find("OVERALL") != std::string::npos);
  CHECK(report.find("PER\t1\t0\t0") != std::string::npos);
}

TEST_CASE("kde needs two samples") {
  CHECK_THROWS_AS(offset_kde({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(offset_kde({}), std::invalid_argument);
}

TEST_CASE("kde with identical samples peaks at that value") {
  // the auto rule degenerates at zero variance, so pass a bandwidth
  const DensityCurve curve = offset_kde({0.7, 0.7, 0.7, 0.7}, 0.25, 101);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < curve.density.size(); ++i) {
    if (curve.density[i] > curve.density[peak]) peak = i;
  }
  double nearest = curve.grid[0];
  for (double x : curve.grid) {
    if (std::fabs(x - 0.7) < std::fabs(nearest - 0.7)) nearest = x;
  }
  CHECK(curve.grid[peak] == doctest::Approx(nearest).epsilon(1e-12));
  CHECK_THROWS_AS(offset_kde({0.7, 0.7, 0.7, 0.7}), std::invalid_argument);
}

TEST_CASE("a symmetric two-point sample gives a symmetric bimodal curve") {
  const DensityCurve curve = offset_kde({-1.0, 1.0}, 0.5, 201);
  auto density_at = [&](double x) {
    const double m = 2.0, h = 0.5;
    double acc = 0.0;
    for (double v : {-1.0, 1.0}) {
      const double u = (x - v) / h;
      acc += std::exp(-0.5 * u * u);
    }
    return acc / (m * h * std::sqrt(2.0 * 3.14159265358979323846));
  };
  CHECK(std::fabs(density_at(-1.0) - density_at(1.0)) < 1e-12);
  // symmetry on the evaluated grid
  const std::size_t g = curve.grid.size();
  for (std::size_t i = 0; i < g; ++i) {
    CHECK(curve.density[i] == doctest::Approx(curve.density[g - 1 - i]).epsilon(1e-9));
  }
}

TEST_CASE("kde curves integrate to one within 2 percent") {
  auto r = oracle::rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> samples;
    const std::size_t m = 100 + r() % 200;
    for (std::size_t i = 0; i < m; ++i) samples.push_back(oracle::uniform(r, -3.0, 3.0));
    const DensityCurve curve = offset_kde(samples);
    CHECK(curve.bandwidth > 0.0);
    for (double d : curve.density) CHECK(d >= 0.0);
    CHECK(trapezoid_integral(curve) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("silverman bandwidth follows 1.06 sigma m^(-1/5)") {
  auto r = oracle::rng(114);
  std::vector<double> samples;
  for (int i = 0; i < 150; ++i) samples.push_back(oracle::uniform(r, -1.0, 1.0));
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= 150.0;
  double sq = 0.0;
  for (double v : samples) sq += (v - mean) * (v - mean);
  const double sigma = std::sqrt(sq / 149.0);
  const DensityCurve curve = offset_kde(samples);
  CHECK(curve.bandwidth == doctest::Approx(1.06 * sigma * std::pow(150.0, -0.2)).epsilon(1e-12));
}
