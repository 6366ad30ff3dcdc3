#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eidforge/eid.hpp"
#include "eidforge/numeric.hpp"

namespace eidforge {

struct Window {
  double lo = 0.5;
  double hi = 3.0;
};

struct VerifyOptions {
  Window window;
  int points = 20;
  double tolerance = 1e-8;
  unsigned seed = 0;
  unsigned precision = default_precision();
  /// Shift or shrink the window away from detected poles.
  bool auto_window = true;
};

struct VerificationReport {
  double max_residual = 0;
  std::vector<std::pair<double, double>> per_point;
  Window window;
  Point bindings;
  bool passed = false;
  double tolerance = 0;
  std::string detail;
};

/// Deterministic low-discrepancy points inside (lo, hi).
std::vector<double> sample_points(const Window& w, int count, unsigned seed = 0);

/// Values in [lo, hi] for each symbol, from a golden-ratio sequence.
Point sample_bindings(const std::set<std::string>& symbols, unsigned seed = 0, double lo = 0.6, double hi = 1.6);

/// Free symbols other than x of all expressions.
std::set<std::string> parameters_of(const std::vector<Expr>& exprs);

/// A window of the preferred length near `preferred` on which every
/// expression is finite and no denominator changes sign or comes close to
/// zero. Falls back to a shorter window; throws WindowError when none exists.
Window find_window(const std::vector<Expr>& exprs, const Point& bindings, const Window& preferred);

/// max |y'' + A y| / max(1, |y|, |y''|) over sample points.
VerificationReport residual(const NormalODE& ode, const Expr& y, const Point& bindings,
                            const VerifyOptions& opts = {});

/// W = y1 y2' - y2 y1' must be constant (stdev < 1e-9 |mean|) and nonzero.
VerificationReport wronskian_check(const Expr& y1, const Expr& y2, const Point& bindings,
                                   const VerifyOptions& opts = {});

using OperatorForm = std::function<Expr(const Expr&)>;

/// max |lhs(f) - rhs(f)| / max(1, |lhs(f)|) over test functions and points.
VerificationReport operator_identity_check(const OperatorForm& lhs, const OperatorForm& rhs,
                                           const std::vector<Expr>& testfns, const Point& bindings,
                                           const VerifyOptions& opts = {});

/// Passes when `e` is numerically constant: stdev < tolerance * max(1, |mean|).
VerificationReport constancy_check(const Expr& e, const Point& bindings, const VerifyOptions& opts = {});

/// Evaluates each expression at the sample points of a common window.
struct Samples {
  Window window;
  std::vector<double> xs;
  std::vector<std::vector<long double>> values;  // values[i][k]: expression k at xs[i]
};
Samples sample(const std::vector<Expr>& exprs, const Point& bindings, const VerifyOptions& opts = {});

}  // namespace eidforge
