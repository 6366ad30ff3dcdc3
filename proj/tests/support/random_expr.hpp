#pragma once

#include <random>

#include "eidforge/expr.hpp"

namespace eidforge::testing {

// Random trees over the kernel grammar: x, a, small rationals, sums,
// products, small integer powers, the five functions of linear arguments,
// and square roots of positive expressions.
class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

  Expr operator()(int depth = 3) {
    if (depth <= 0) return leaf();
    switch (pick(0, 7)) {
      case 0:
        return leaf();
      case 1:
      case 2:
        return (*this)(depth - 1) + (*this)(depth - 1);
      case 3:
      case 4:
        return (*this)(depth - 1) * (*this)(depth - 1);
      case 5: {
        long k = pick(-2, 3);
        if (k < 0) return pow(positive(depth - 1), k);
        return pow((*this)(depth - 1), k == 0 ? 2 : k);
      }
      case 6:
        return function(linear());
      default:
        return sqrt(positive(depth - 1));
    }
  }

  // Values drawn for x and a by tests.
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  Expr leaf() {
    switch (pick(0, 3)) {
      case 0:
      case 1:
        return symbols::x();
      case 2:
        return symbols::param("a");
      default: {
        long d = pick(1, 3);
        long n = pick(-4, 4);
        return Expr::rational(n == 0 ? 1 : n, d);
      }
    }
  }

  Expr linear() { return Expr::rational(pick(1, 3), pick(1, 2)) * symbols::x() + Expr::rational(pick(-2, 2), 2); }

  Expr function(const Expr& u) {
    switch (pick(0, 4)) {
      case 0:
        return exp(u);
      case 1:
        return sin(u);
      case 2:
        return cos(u);
      case 3:
        return sinh(u);
      default:
        return cosh(u);
    }
  }

  // Bounded away from zero for x in (0.5, 3) and a in (0.6, 1.6).
  Expr positive(int depth) {
    switch (pick(0, 3)) {
      case 0:
        return cosh(linear());
      case 1:
        return exp(linear());
      case 2:
        return symbols::x() + symbols::param("a");
      default: {
        Expr e = depth > 0 ? (*this)(depth - 1) : leaf();
        return e * e + Expr(1);
      }
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace eidforge::testing
