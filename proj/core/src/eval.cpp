#include "dsner/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dsner {

std::vector<Span> extract_spans(const std::vector<std::string>& tags) {
  std::vector<Span> spans;
  bool open = false;
  std::size_t open_start = 0;
  std::string open_type;
  auto close_at = [&](std::size_t end) {
    spans.push_back({open_start, end, open_type});
    open = false;
  };
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const std::string& tag = tags[t];
    const bool typed = tag.size() >= 3 && tag[1] == '-';
    const char kind = typed ? tag[0] : '\0';
    const std::string type = typed ? tag.substr(2) : "";
    switch (kind) {
      case 'S':
        if (open) close_at(t - 1);
        spans.push_back({t, t, type});
        break;
      case 'B':
        if (open) close_at(t - 1);
        open = true;
        open_start = t;
        open_type = type;
        break;
      case 'I':
        if (!open) {  // dangling I- opens a run, same repair as the converter
          open = true;
          open_start = t;
          open_type = type;
        }
        break;
      case 'E':
        if (open) {
          close_at(t);  // type comes from the opening tag
        } else {
          spans.push_back({t, t, type});
        }
        break;
      default:  // O, padding, anything untyped
        if (open) close_at(t - 1);
        break;
    }
  }
  if (open) close_at(tags.size() - 1);
  return spans;
}

std::vector<std::string> encode_bioes(const std::vector<Span>& spans, std::size_t length) {
  std::vector<std::string> tags(length, "O");
  for (const Span& s : spans) {
    if (s.start > s.end || s.end >= length) {
      throw std::invalid_argument("encode_bioes: span [" + std::to_string(s.start) + "," +
                                  std::to_string(s.end) + "] exceeds length " +
                                  std::to_string(length));
    }
    if (s.start == s.end) {
      tags[s.start] = "S-" + s.type;
      continue;
    }
    tags[s.start] = "B-" + s.type;
    for (std::size_t t = s.start + 1; t < s.end; ++t) tags[t] = "I-" + s.type;
    tags[s.end] = "E-" + s.type;
  }
  return tags;
}

Metrics prf1(const std::vector<std::vector<Span>>& gold,
             const std::vector<std::vector<Span>>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("prf1: " + std::to_string(gold.size()) + " gold sentences vs " +
                                std::to_string(pred.size()) + " predicted");
  }
  Metrics m;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const std::set<Span> gs(gold[s].begin(), gold[s].end());
    const std::set<Span> ps(pred[s].begin(), pred[s].end());
    for (const Span& sp : ps) {
      if (gs.count(sp)) {
        ++m.tp;
        ++m.per_type[sp.type].tp;
      } else {
        ++m.fp;
        ++m.per_type[sp.type].fp;
      }
    }
    for (const Span& sp : gs) {
      if (!ps.count(sp)) {
        ++m.fn;
        ++m.per_type[sp.type].fn;
      }
    }
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::string metrics_report(const Metrics& m) {
  std::ostringstream out;
  out << "type\tTP\tFP\tFN\tP\tR\tF\n";
  const auto line = [&](const std::string& name, std::size_t tp, std::size_t fp, std::size_t fn) {
    const double p = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    out << name << "\t" << tp << "\t" << fp << "\t" << fn << "\t" << p << "\t" << r << "\t" << f
        << "\n";
  };
  for (const auto& [type, c] : m.per_type) line(type, c.tp, c.fp, c.fn);
  line("OVERALL", m.tp, m.fp, m.fn);
  return out.str();
}

DensityCurve offset_kde(const std::vector<double>& samples, double bandwidth,
                        std::size_t grid_points) {
  if (samples.size() < 2) {
    throw std::invalid_argument("offset_kde: need at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  if (grid_points < 2) throw std::invalid_argument("offset_kde: need at least 2 grid points");
  const double m = static_cast<double>(samples.size());

  double h = bandwidth;
  if (h <= 0.0) {
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= m;
    double sq = 0.0;
    for (double v : samples) sq += (v - mean) * (v - mean);
    const double sigma = std::sqrt(sq / (m - 1.0));
    if (sigma == 0.0) {
      throw std::invalid_argument(
          "offset_kde: degenerate sample (zero variance), pass an explicit bandwidth");
    }
    h = 1.06 * sigma * std::pow(m, -0.2);  // Silverman
  }

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);

  DensityCurve curve;
  curve.bandwidth = h;
  curve.grid.resize(grid_points);
  curve.density.resize(grid_points);
  const double norm = 1.0 / (m * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = lo + step * static_cast<double>(i);
    double acc = 0.0;
    for (double v : samples) {
      const double u = (x - v) / h;
      acc += std::exp(-0.5 * u * u);
    }
    curve.grid[i] = x;
    curve.density[i] = norm * acc;
  }
  return curve;
}

double trapezoid_integral(const DensityCurve& curve) {
  double acc = 0.0;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    acc += 0.5 * (curve.density[i] + curve.density[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
  }
  return acc;
}

}  // namespace dsner
