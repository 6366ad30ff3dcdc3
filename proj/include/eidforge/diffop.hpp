#pragma once

#include <string>
#include <vector>

#include "eidforge/expr.hpp"

namespace eidforge {

/// The operator beta*D + alpha.
class FirstOrderOp {
 public:
  /// Throws ValidationError when beta normalizes to zero.
  FirstOrderOp(Expr beta, Expr alpha);

  /// D - alpha, the form z = y' - alpha*y used by chains.
  static FirstOrderOp shift(const Expr& alpha);
  /// P = beta*D + alpha.
  static FirstOrderOp p_operator(const Expr& alpha, const Expr& beta);
  /// Q = beta*D - alpha - beta'.
  static FirstOrderOp q_operator(const Expr& alpha, const Expr& beta);

  const Expr& beta() const { return beta_; }
  const Expr& alpha() const { return alpha_; }

  /// beta*f' + alpha*f, normalized.
  Expr apply(const Expr& f) const;
  /// Same without normalization.
  Expr apply_raw(const Expr& f) const;

  std::string to_text() const;
  std::string to_latex() const;

 private:
  Expr beta_;
  Expr alpha_;
};

/// Ordered composition; ops()[0] is applied first.
class OperatorChain {
 public:
  OperatorChain() = default;
  explicit OperatorChain(std::vector<FirstOrderOp> ops) : ops_(std::move(ops)) {}

  void push_back(FirstOrderOp op) { ops_.push_back(std::move(op)); }
  const std::vector<FirstOrderOp>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  Expr apply(const Expr& f) const;
  Expr apply_raw(const Expr& f) const;

  /// Factors written left to right as they act, last applied first.
  std::string to_text() const;
  std::string to_latex() const;

 private:
  std::vector<FirstOrderOp> ops_;
};

Expr apply(const FirstOrderOp& op, const Expr& f);
Expr apply_chain(const OperatorChain& chain, const Expr& f);

/// alpha' + alpha^2 + a0 - lambda, normalized.
Expr riccati_residual(const Expr& alpha, const Expr& a0, const Expr& lambda);

/// General solution of (D - alpha2)(D - alpha1) y = 0:
/// exp(int alpha1) * (c1 + c2 * int exp(int (alpha2 - alpha1))).
Expr solution_from_factorization(const Expr& alpha1, const Expr& alpha2, const Expr& c1, const Expr& c2);

}  // namespace eidforge
