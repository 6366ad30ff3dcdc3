#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "eidforge/diffop.hpp"
#include "eidforge/expr.hpp"

namespace eidforge {

/// y'' + coeff*y = 0.
///
/// `spectral` is the part of coeff held fixed along a chain, such as the
/// lambda^2 of y'' + lambda^2 y = 0. An eigenfunction at eigenvalue mu
/// solves y'' + (coeff - spectral - mu) y = 0.
struct NormalODE {
  Expr coeff;
  Expr spectral = Expr(0);
  /// Optional unnormalized form kept for printing.
  std::optional<Expr> display;

  NormalODE() = default;
  explicit NormalODE(Expr a, Expr spectral_part = Expr(0));

  /// coeff - spectral: the potential seen by eigenfunctions.
  Expr potential() const;
  const Expr& shown() const { return display ? *display : coeff; }
};

using Matrix2 = std::array<std::array<Expr, 2>, 2>;

/// Z = T Y, with Y = (y, y') and Z = (z, z').
struct TransferMatrix {
  Matrix2 entries;
  const Expr& operator()(int i, int j) const { return entries[i][j]; }
  Expr det() const;
};

/// Companion matrix [[0, 1], [-a0, 0]] of y'' + a0 y = 0.
Matrix2 companion(const Expr& a0);

struct ChainStep {
  Expr eigenfunction;
  Expr eigenvalue;
  Expr log_derivative;
  Expr new_coeff;
  /// False when the step's first integral vanishes.
  bool invertible = true;
};

struct GeneratedProblem {
  NormalODE ode;
  Expr solution;
  std::vector<ChainStep> trace;
  bool resonant = false;
  std::pair<Expr, Expr> constants{Expr::parameter("c1"), Expr::parameter("c2")};
  OperatorChain operators;
  /// The starting equation and solution of the chain.
  NormalODE seed_ode;
  Expr seed_solution;
};

struct NormalForm {
  Expr A0;
  Expr gauge;
};

/// y'' + a1 y' + a0 y = 0 becomes Y'' + A0 Y = 0 under y = gauge * Y.
NormalForm reduce_to_normal_form(const Expr& a1, const Expr& a0);

struct StepResult {
  NormalODE ode;
  FirstOrderOp op;
  ChainStep step;
};

/// One step with eigenfunction ytilde at eigenvalue mu. The new
/// coefficient is coeff + 2 (ytilde'/ytilde)' and the operator is
/// D - ytilde'/ytilde. ytilde must solve y'' + (potential - mu) y = 0; this
/// is checked symbolically, then at 20 sample points with tolerance 1e-8.
/// Throws InvalidEigenfunctionError otherwise.
StepResult eid_step(const NormalODE& ode, const Expr& eigenfunction, const Expr& eigenvalue, int step_index = -1);

/// Folds eid_step over `steps` and applies the collected operators to
/// `seed_solution`.
GeneratedProblem chain(const NormalODE& ode, const std::vector<std::pair<Expr, Expr>>& steps,
                       const Expr& seed_solution);

/// Transfer-matrix quantities below take alpha in the z = y' - alpha*y reading
/// used by chains and map it to alpha1 = -alpha internally.

/// T = [[alpha1, beta], [alpha1' - beta*a0, alpha1 + beta']].
TransferMatrix transfer_matrix(const Expr& alpha, const Expr& beta, const Expr& a0);

/// T' - B T + T A, entrywise normalized.
Matrix2 intertwining_residual(const TransferMatrix& T, const Expr& a0, const Expr& b0);

/// alpha1 beta' - beta alpha1' + alpha1^2 + a0 beta^2.
Expr first_integral(const Expr& alpha, const Expr& beta, const Expr& a0);
/// alpha1 beta' + beta alpha1' + alpha1^2 + beta beta'' + b0 beta^2.
Expr first_integral_alt(const Expr& alpha, const Expr& beta, const Expr& b0);

struct CompatibilityResidual {
  /// alpha1'' + (b0 - a0) alpha1 - 2 a0 beta' - beta a0'.
  Expr alpha_equation;
  /// beta'' + (b0 - a0) beta + 2 alpha1'.
  Expr beta_equation;
  /// first_integral_alt - first_integral - beta * beta_equation; always 0.
  Expr forms_difference;
};

CompatibilityResidual compatibility_residual(const Expr& alpha, const Expr& beta, const Expr& a0, const Expr& b0);

/// y = ((alpha1 + beta')/K) z - (beta/K) z'. Throws DegenerateTransformError
/// when K normalizes to zero.
FirstOrderOp inverse_op(const Expr& alpha, const Expr& beta, const Expr& K);

/// The forward map z = beta*y' + alpha1*y as an operator.
FirstOrderOp forward_op(const Expr& alpha, const Expr& beta);

/// ((QP + K)Q - Q(PQ + K)) f and (P(QP + K) - (PQ + K)P) f, normalized.
std::pair<Expr, Expr> commutation_residual(const Expr& alpha, const Expr& beta, const Expr& K, const Expr& testfn);

}  // namespace eidforge
