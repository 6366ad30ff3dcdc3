#include "eidforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"

namespace eidforge {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kPlastic = 0.7548776662466927;

double frac(double v) { return v - std::floor(v); }

bool has_integral(const Expr& e) { return e.contains_kind(NodeKind::Integral); }

std::vector<long double> evaluate_at(const std::vector<Expr>& exprs, double x, const Point& bindings, unsigned bits,
                                     double base) {
  Point p = bindings;
  p["x"] = x;
  Evaluator ev(p, bits, base);
  std::vector<long double> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) {
    long double v = ev(e);
    if (!std::isfinite(static_cast<double>(v))) throw PoleError("non-finite value", x);
    out.push_back(v);
  }
  return out;
}

unsigned doubled(unsigned bits) { return std::max(128U, bits * 2); }

// Runs `measure` (values -> residual) over sample points of a pole-free
// window, retrying each failing point at doubled precision.
template <class Measure>
VerificationReport run_points(const std::vector<Expr>& exprs, const Point& bindings, const VerifyOptions& opts,
                              Measure measure) {
  VerificationReport rep;
  rep.bindings = bindings;
  rep.tolerance = opts.tolerance;
  rep.window = opts.auto_window ? find_window(exprs, bindings, opts.window) : opts.window;
  std::vector<double> xs = sample_points(rep.window, opts.points * 4, opts.seed);
  for (double x : xs) {
    if (static_cast<int>(rep.per_point.size()) == opts.points) break;
    double r = 0;
    try {
      r = measure(evaluate_at(exprs, x, bindings, opts.precision, rep.window.lo));
      if (!(r < opts.tolerance)) r = measure(evaluate_at(exprs, x, bindings, doubled(opts.precision), rep.window.lo));
    } catch (const PoleError&) {
      continue;
    }
    rep.per_point.emplace_back(x, r);
    if (!(r <= rep.max_residual)) rep.max_residual = r;
  }
  if (static_cast<int>(rep.per_point.size()) < opts.points)
    throw WindowError("too few pole-free sample points in [" + std::to_string(rep.window.lo) + ", " +
                      std::to_string(rep.window.hi) + "]");
  rep.passed = rep.max_residual < opts.tolerance;
  return rep;
}

long double rel(long double diff, std::initializer_list<long double> scales) {
  long double s = 1;
  for (long double v : scales) s = std::max(s, std::fabs(v));
  return std::fabs(diff) / s;
}

}  // namespace

std::vector<double> sample_points(const Window& w, int count, unsigned seed) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  double start = frac(0.5 + kPlastic * seed);
  for (int i = 0; i < count; ++i) {
    double u = frac(start + kGolden * (i + 1));
    xs.push_back(w.lo + (w.hi - w.lo) * (0.02 + 0.96 * u));
  }
  return xs;
}

Point sample_bindings(const std::set<std::string>& symbols, unsigned seed, double lo, double hi) {
  Point p;
  int j = 0;
  for (const auto& s : symbols) {
    double u = frac(0.3 + 0.41421356237309515 * (seed + 1) + kGolden * j++);
    p[s] = lo + (hi - lo) * u;
  }
  return p;
}

std::set<std::string> parameters_of(const std::vector<Expr>& exprs) {
  std::set<std::string> out;
  for (const auto& e : exprs)
    for (const auto& s : e.free_symbols())
      if (s != "x") out.insert(s);
  return out;
}

namespace {

void collect_integrands(const Expr& e, std::vector<Expr>& out) {
  if (e.is(NodeKind::Integral)) {
    if (std::find(out.begin(), out.end(), e.integrand()) == out.end()) out.push_back(e.integrand());
  }
  for (const auto& op : e.operands()) collect_integrands(op, out);
}

}  // namespace

Window find_window(const std::vector<Expr>& exprs, const Point& bindings, const Window& preferred) {
  std::vector<Expr> direct, integrands;
  for (const auto& e : exprs) {
    if (has_integral(e))
      collect_integrands(e, integrands);
    else
      direct.push_back(e);
  }
  const std::size_t n_direct = direct.size();
  for (const auto& e : integrands)
    if (std::find(direct.begin(), direct.end(), e) == direct.end()) direct.push_back(e);
  std::vector<Expr> bases;
  // Zeros of an integrand denominator are avoided even when removable: the
  // quadrature runs from the window edge and cancels badly near them.
  std::vector<char> strict;
  for (std::size_t i = 0; i < direct.size(); ++i)
    for (const auto& d : denominators(direct[i])) {
      if (has_integral(d)) continue;
      auto it = std::find(bases.begin(), bases.end(), d);
      if (it == bases.end()) {
        bases.push_back(d);
        strict.push_back(i >= n_direct);
      } else if (i >= n_direct) {
        strict[static_cast<std::size_t>(it - bases.begin())] = 1;
      }
    }

  const double len = preferred.hi - preferred.lo;
  const double from = preferred.lo - 3 * len;
  const double to = preferred.hi + 3 * len;
  const int n = 1400;
  const double h = (to - from) / n;
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = from + h * i;

  auto eval_all = [&](const std::vector<Expr>& es, double x) {
    Point p = bindings;
    p["x"] = x;
    Evaluator ev(p, 64, preferred.lo);
    std::vector<long double> out;
    for (const auto& e : es) {
      long double v = ev(e);
      if (!std::isfinite(static_cast<double>(v))) throw PoleError("non-finite", x);
      out.push_back(v);
    }
    return out;
  };

  std::vector<char> bad(n + 1, 0);
  std::vector<std::vector<long double>> bv(bases.size(), std::vector<long double>(n + 1, 0));
  std::vector<std::vector<long double>> dv(direct.size());
  for (int i = 0; i <= n; ++i) {
    try {
      auto b = eval_all(bases, grid[i]);
      for (std::size_t k = 0; k < b.size(); ++k) bv[k][i] = b[k];
      auto d = eval_all(direct, grid[i]);
      for (std::size_t k = 0; k < d.size(); ++k) dv[k].push_back(std::fabs(d[k]));
    } catch (const PoleError&) {
      bad[i] = 1;
    }
  }
  std::vector<long double> typical;
  for (auto& v : dv) {
    if (v.empty()) {
      typical.push_back(1);
      continue;
    }
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    typical.push_back(std::max(v[v.size() / 2], 1e-30L));
  }
  // A zero of a denominator is a pole only if some expression blows up
  // next to it; conjugate factors from normalization give removable ones.
  auto blows_up = [&](double x0) {
    for (double dx : {-1e-6, 1e-6}) {
      try {
        auto d = eval_all(direct, x0 + dx);
        for (std::size_t k = 0; k < d.size(); ++k)
          if (std::fabs(d[k]) > 1e3L * std::max(1.0L, typical[k])) return true;
      } catch (const PoleError&) {
        return true;
      }
    }
    return direct.empty();
  };
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const auto& vals = bv[k];
    std::vector<long double> mags;
    for (int i = 0; i <= n; ++i)
      if (!bad[i]) mags.push_back(std::fabs(vals[i]));
    if (mags.empty()) continue;
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    long double median = mags[mags.size() / 2];
    auto base_at = [&](double x) { return eval_all({bases[k]}, x)[0]; };
    for (int i = 0; i <= n; ++i) {
      if (bad[i]) continue;
      try {
        if (i < n && !bad[i + 1] && ((vals[i] < 0) != (vals[i + 1] < 0))) {
          double a = grid[i], b = grid[i + 1];
          bool neg = base_at(a) < 0;
          for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (a + b);
            ((base_at(mid) < 0) == neg ? a : b) = mid;
          }
          if (strict[k] || blows_up(0.5 * (a + b))) bad[i] = bad[i + 1] = 2;
          continue;
        }
        long double m = std::fabs(vals[i]);
        bool local_min = i > 0 && i < n && m <= std::fabs(vals[i - 1]) && m <= std::fabs(vals[i + 1]);
        if (local_min && m < 1e-3L * median) {
          double a = grid[i - 1], b = grid[i + 1];
          for (int it = 0; it < 80; ++it) {
            double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (std::fabs(base_at(m1)) < std::fabs(base_at(m2)))
              b = m2;
            else
              a = m1;
          }
          if (strict[k] || blows_up(0.5 * (a + b))) bad[i] = 2;
        }
      } catch (const PoleError&) {
        bad[i] = 2;
      }
    }
  }
  const int margin = std::max(2, n / 200);
  std::vector<char> blocked(n + 1, 0);
  for (int i = 0; i <= n; ++i)
    if (bad[i])
      for (int j = std::max(0, i - margin); j <= std::min(n, i + margin); ++j) blocked[j] = 1;

  std::vector<std::pair<double, double>> runs;
  for (int i = 0; i <= n;) {
    if (blocked[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 <= n && !blocked[j + 1]) ++j;
    runs.emplace_back(grid[i], grid[j]);
    i = j + 1;
  }
  bool found = false;
  Window best;
  double best_shift = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : runs) {
    if (b - a < len) continue;
    double lo = std::clamp(preferred.lo, a, b - len);
    double shift = std::fabs(lo - preferred.lo);
    if (shift < best_shift) {
      best_shift = shift;
      best = {lo, lo + len};
      found = true;
    }
  }
  if (found) return best_shift < h ? preferred : best;
  double longest = 0;
  for (const auto& [a, b] : runs) {
    double ca = std::max(a, preferred.lo - len), cb = std::min(b, preferred.hi + len);
    if (cb - ca > longest) {
      longest = cb - ca;
      best = {ca, cb};
    }
  }
  if (longest >= len / 8) return best;
  throw WindowError("no pole-free window near [" + std::to_string(preferred.lo) + ", " +
                    std::to_string(preferred.hi) + "]");
}

VerificationReport residual(const NormalODE& ode, const Expr& y, const Point& bindings, const VerifyOptions& opts) {
  Expr ypp = derivative(derivative(y));
  std::vector<Expr> exprs{y, ypp, ode.coeff};
  return run_points(exprs, bindings, opts, [](const std::vector<long double>& v) {
    return static_cast<double>(rel(v[1] + v[2] * v[0], {v[0], v[1]}));
  });
}

VerificationReport wronskian_check(const Expr& y1, const Expr& y2, const Point& bindings, const VerifyOptions& opts) {
  std::vector<Expr> exprs{y1 * derivative(y2), y2 * derivative(y1)};
  VerifyOptions loose = opts;
  loose.tolerance = std::numeric_limits<double>::infinity();
  VerificationReport rep = run_points(exprs, bindings, loose, [](const std::vector<long double>& v) {
    return static_cast<double>(v[0] - v[1]);
  });
  rep.tolerance = opts.tolerance;
  long double mean = 0, scale = 0;
  for (const auto& pt : rep.per_point) mean += pt.second;
  mean /= rep.per_point.size();
  long double var = 0;
  for (const auto& pt : rep.per_point) var += (pt.second - mean) * (pt.second - mean);
  long double sd = std::sqrt(var / rep.per_point.size());
  for (double x : sample_points(rep.window, 3, opts.seed)) {
    try {
      auto v = evaluate_at(exprs, x, bindings, opts.precision, rep.window.lo);
      scale = std::max(scale, std::fabs(v[0]) + std::fabs(v[1]));
    } catch (const PoleError&) {
    }
  }
  bool nonzero = std::fabs(mean) > 1e-9L * std::max(scale, 1e-300L);
  rep.max_residual = nonzero ? static_cast<double>(sd / std::fabs(mean)) : std::numeric_limits<double>::infinity();
  rep.passed = nonzero && rep.max_residual < opts.tolerance;
  rep.detail = "mean W = " + std::to_string(static_cast<double>(mean));
  return rep;
}

VerificationReport operator_identity_check(const OperatorForm& lhs, const OperatorForm& rhs,
                                           const std::vector<Expr>& testfns, const Point& bindings,
                                           const VerifyOptions& opts) {
  std::vector<Expr> exprs;
  for (const auto& f : testfns) {
    exprs.push_back(lhs(f));
    exprs.push_back(rhs(f));
  }
  return run_points(exprs, bindings, opts, [](const std::vector<long double>& v) {
    long double worst = 0;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) worst = std::max(worst, rel(v[i] - v[i + 1], {v[i]}));
    return static_cast<double>(worst);
  });
}

VerificationReport constancy_check(const Expr& e, const Point& bindings, const VerifyOptions& opts) {
  VerifyOptions loose = opts;
  loose.tolerance = std::numeric_limits<double>::infinity();
  VerificationReport rep =
      run_points({e}, bindings, loose, [](const std::vector<long double>& v) { return static_cast<double>(v[0]); });
  rep.tolerance = opts.tolerance;
  long double mean = 0;
  for (const auto& pt : rep.per_point) mean += pt.second;
  mean /= rep.per_point.size();
  long double var = 0;
  for (const auto& pt : rep.per_point) var += (pt.second - mean) * (pt.second - mean);
  long double sd = std::sqrt(var / rep.per_point.size());
  rep.max_residual = static_cast<double>(sd / std::max(1.0L, std::fabs(mean)));
  rep.passed = rep.max_residual < opts.tolerance;
  rep.detail = "mean = " + std::to_string(static_cast<double>(mean));
  return rep;
}

Samples sample(const std::vector<Expr>& exprs, const Point& bindings, const VerifyOptions& opts) {
  Samples s;
  s.window = opts.auto_window ? find_window(exprs, bindings, opts.window) : opts.window;
  for (double x : sample_points(s.window, opts.points * 4, opts.seed)) {
    if (static_cast<int>(s.xs.size()) == opts.points) break;
    try {
      s.values.push_back(evaluate_at(exprs, x, bindings, opts.precision, s.window.lo));
      s.xs.push_back(x);
    } catch (const PoleError&) {
    }
  }
  if (static_cast<int>(s.xs.size()) < opts.points) throw WindowError("too few pole-free sample points");
  return s;
}

}  // namespace eidforge
