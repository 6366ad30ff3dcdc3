#pragma once

// Checks that a function is a constant linear combination of a basis pair:
// p = alpha g1 + beta g2 with alpha = W(p, g2)/W(g1, g2) and
// beta = W(g1, p)/W(g1, g2), W(u, v) = u v' - v u'.

#include <algorithm>
#include <cmath>
#include <vector>

#include "eidforge/calculus.hpp"
#include "eidforge/numeric.hpp"
#include "eidforge/verify.hpp"

namespace eidforge::testing {

struct SpanResult {
  double alpha = 0;
  double beta = 0;
  /// Relative spread of the coefficients over the sample points.
  double spread = 0;
  /// max |p - alpha g1 - beta g2| / max(1, |p|).
  double misfit = 0;
};

inline Expr wronskian(const Expr& u, const Expr& v) { return u * derivative(v) - v * derivative(u); }

inline SpanResult span_check(const Expr& p, const Expr& g1, const Expr& g2, const Point& bindings,
                             Window preferred = {0.5, 3.0}, int points = 10) {
  Expr w12 = wronskian(g1, g2), wp2 = wronskian(p, g2), w1p = wronskian(g1, p);
  VerifyOptions o;
  o.window = preferred;
  o.points = points;
  o.precision = 128;
  Samples s = sample({w12, wp2, w1p, p, g1, g2}, bindings, o);
  std::vector<long double> as, bs;
  for (const auto& v : s.values) {
    as.push_back(v[1] / v[0]);
    bs.push_back(v[2] / v[0]);
  }
  auto spread = [](const std::vector<long double>& xs, long double& mean) {
    mean = 0;
    for (auto v : xs) mean += v;
    mean /= xs.size();
    long double var = 0;
    for (auto v : xs) var += (v - mean) * (v - mean);
    return std::sqrt(var / xs.size()) / std::max(1.0L, std::fabs(mean));
  };
  SpanResult r;
  long double ma = 0, mb = 0;
  r.spread = static_cast<double>(std::max(spread(as, ma), spread(bs, mb)));
  r.alpha = static_cast<double>(ma);
  r.beta = static_cast<double>(mb);
  long double worst = 0;
  for (const auto& v : s.values)
    worst = std::max(worst, std::fabs(v[3] - ma * v[4] - mb * v[5]) / std::max(1.0L, std::fabs(v[3])));
  r.misfit = static_cast<double>(worst);
  return r;
}

}  // namespace eidforge::testing
