#pragma once

#include <map>
#include <memory>
#include <string>

#include "eidforge/expr.hpp"

namespace eidforge {

/// Values for every free symbol, including the variable x.
using Point = std::map<std::string, double>;

struct NumericResult {
  long double value = 0;
  /// |v(p) - v(2p)|, the change when the working precision is doubled.
  long double error = 0;
};

/// Working precision in bits: EIDFORGE_PRECISION if set, else 64.
unsigned default_precision();

/// Evaluates `e` at `point`. Unevaluated integrals run from `integral_base`
/// to the bound value of their variable by adaptive Gauss-Kronrod.
/// Throws PoleError when a denominator vanishes and UnboundSymbolError
/// when a symbol has no value.
NumericResult eval_numeric(const Expr& e, const Point& point, unsigned precision_bits = default_precision(),
                           double integral_base = 0.0);

/// Decimal string of the value at the given precision.
std::string eval_decimal(const Expr& e, const Point& point, unsigned precision_bits, int digits,
                         double integral_base = 0.0);

/// Evaluates several trees at one point, sharing common subtrees.
class Evaluator {
 public:
  Evaluator(Point point, unsigned precision_bits = default_precision(), double integral_base = 0.0);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  long double operator()(const Expr& e);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Adaptive quadrature of `integrand` over [lo, hi] in the variable `var`.
/// `error` receives the estimate.
long double quadrature(const Expr& integrand, const Point& bindings, double lo, double hi,
                       unsigned precision_bits = default_precision(), long double* error = nullptr,
                       const std::string& var = "x");

}  // namespace eidforge
