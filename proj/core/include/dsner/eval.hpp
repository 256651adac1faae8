#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace dsner {

/// A typed entity span with inclusive endpoints.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string type;
  auto operator<=>(const Span&) const = default;
};

/// Entity spans of a BIOES tag sequence. Malformed runs are repaired the same
/// way the BIO converter repairs them: a dangling I-/E- opens (or closes) a
/// run, the type of a run comes from its opening tag, and a run left open at
/// a boundary still counts.
std::vector<Span> extract_spans(const std::vector<std::string>& tags);

/// Inverse of extract_spans for well-formed non-overlapping spans.
std::vector<std::string> encode_bioes(const std::vector<Span>& spans, std::size_t length);

struct TypeCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::map<std::string, TypeCounts> per_type;
};

/// Exact-match micro P/R/F1 over per-sentence span sets, with a per-type
/// breakdown. Empty denominators yield 0.
Metrics prf1(const std::vector<std::vector<Span>>& gold,
             const std::vector<std::vector<Span>>& pred);

/// Tab-separated (type, TP, FP, FN, P, R, F) rows plus an overall row.
std::string metrics_report(const Metrics& m);

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian kernel density estimate on a uniform grid over
/// [min - 3h, max + 3h]. Pass bandwidth <= 0 for Silverman's rule
/// 1.06 * sigma * m^(-1/5); that rule needs a non-degenerate sample.
DensityCurve offset_kde(const std::vector<double>& samples, double bandwidth = 0.0,
                        std::size_t grid_points = 200);

/// Trapezoidal integral of a curve (the validity check for densities).
double trapezoid_integral(const DensityCurve& curve);

}  // namespace dsner
