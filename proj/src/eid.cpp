#include "eidforge/eid.hpp"

#include <limits>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/verify.hpp"

namespace eidforge {

NormalODE::NormalODE(Expr a, Expr spectral_part) : coeff(normalize(a)), spectral(normalize(spectral_part)) {}

Expr NormalODE::potential() const { return normalize(coeff - spectral); }

Expr TransferMatrix::det() const {
  return normalize(entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]);
}

Matrix2 companion(const Expr& a0) { return Matrix2{{{Expr(0), Expr(1)}, {normalize(-a0), Expr(0)}}}; }

NormalForm reduce_to_normal_form(const Expr& a1, const Expr& a0) {
  NormalForm out;
  out.A0 = normalize(a0 - a1 * a1 / Expr(4) - derivative(a1) / Expr(2));
  out.gauge = exp_of_integral(normalize(-a1 / Expr(2)));
  return out;
}

StepResult eid_step(const NormalODE& ode, const Expr& eigenfunction, const Expr& eigenvalue, int step_index) {
  Expr shifted = normalize(ode.potential() - eigenvalue);
  Expr check = derivative(derivative(eigenfunction)) + shifted * eigenfunction;
  if (!is_zero(check)) {
    Point bindings = sample_bindings(parameters_of({eigenfunction, shifted}));
    VerifyOptions opts;
    opts.tolerance = 1e-8;
    opts.points = 20;
    VerificationReport rep;
    try {
      rep = residual(NormalODE(shifted), eigenfunction, bindings, opts);
    } catch (const WindowError&) {
      throw InvalidEigenfunctionError(std::numeric_limits<double>::infinity(), step_index);
    }
    if (!rep.passed) throw InvalidEigenfunctionError(rep.max_residual, step_index);
  }
  Expr logd = normalize(derivative(eigenfunction) / eigenfunction);
  Expr coeff = normalize(ode.coeff + Expr(2) * derivative(logd));
  ChainStep step{eigenfunction, eigenvalue, logd, coeff, !is_zero(eigenvalue + ode.spectral)};
  NormalODE next(coeff, ode.spectral);
  return StepResult{next, FirstOrderOp::shift(logd), step};
}

GeneratedProblem chain(const NormalODE& ode, const std::vector<std::pair<Expr, Expr>>& steps,
                       const Expr& seed_solution) {
  GeneratedProblem gp;
  gp.seed_ode = ode;
  gp.seed_solution = seed_solution;
  NormalODE current = ode;
  int index = 0;
  for (const auto& [ytilde, mu] : steps) {
    StepResult r = eid_step(current, ytilde, mu, index++);
    gp.trace.push_back(r.step);
    gp.operators.push_back(r.op);
    current = r.ode;
  }
  gp.ode = current;
  gp.solution = steps.empty() ? seed_solution : gp.operators.apply(seed_solution);
  return gp;
}

TransferMatrix transfer_matrix(const Expr& alpha, const Expr& beta, const Expr& a0) {
  Expr a1 = normalize(-alpha);
  TransferMatrix t;
  t.entries = Matrix2{{{a1, normalize(beta)},
                       {normalize(derivative(a1) - beta * a0), normalize(a1 + derivative(beta))}}};
  return t;
}

Matrix2 intertwining_residual(const TransferMatrix& T, const Expr& a0, const Expr& b0) {
  Matrix2 A = companion(a0);
  Matrix2 B = companion(b0);
  Matrix2 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Expr e = derivative(T(i, j));
      for (int k = 0; k < 2; ++k) e = e - B[i][k] * T(k, j) + T(i, k) * A[k][j];
      out[i][j] = normalize(e);
    }
  }
  return out;
}

Expr first_integral(const Expr& alpha, const Expr& beta, const Expr& a0) {
  Expr a1 = -alpha;
  return normalize(a1 * derivative(beta) - beta * derivative(a1) + a1 * a1 + a0 * beta * beta);
}

Expr first_integral_alt(const Expr& alpha, const Expr& beta, const Expr& b0) {
  Expr a1 = -alpha;
  Expr db = derivative(beta);
  return normalize(a1 * db + beta * derivative(a1) + a1 * a1 + beta * derivative(db) + b0 * beta * beta);
}

CompatibilityResidual compatibility_residual(const Expr& alpha, const Expr& beta, const Expr& a0, const Expr& b0) {
  Expr a1 = -alpha;
  Expr db = derivative(beta);
  CompatibilityResidual r;
  r.alpha_equation =
      normalize(derivative(derivative(a1)) + (b0 - a0) * a1 - Expr(2) * a0 * db - beta * derivative(a0));
  r.beta_equation = normalize(derivative(db) + (b0 - a0) * beta + Expr(2) * derivative(a1));
  r.forms_difference =
      normalize(first_integral_alt(alpha, beta, b0) - first_integral(alpha, beta, a0) - beta * r.beta_equation);
  return r;
}

FirstOrderOp forward_op(const Expr& alpha, const Expr& beta) { return FirstOrderOp(beta, normalize(-alpha)); }

FirstOrderOp inverse_op(const Expr& alpha, const Expr& beta, const Expr& K) {
  if (is_zero(K)) throw DegenerateTransformError("first integral K vanishes; the transformation has no inverse");
  Expr a1 = -alpha;
  return FirstOrderOp(normalize(-beta / K), normalize((a1 + derivative(beta)) / K));
}

std::pair<Expr, Expr> commutation_residual(const Expr& alpha, const Expr& beta, const Expr& K, const Expr& testfn) {
  Expr a1 = normalize(-alpha);
  FirstOrderOp P = FirstOrderOp::p_operator(a1, beta);
  FirstOrderOp Q = FirstOrderOp::q_operator(a1, beta);
  auto qp_k = [&](const Expr& g) { return Q.apply_raw(P.apply_raw(g)) + K * g; };
  auto pq_k = [&](const Expr& g) { return P.apply_raw(Q.apply_raw(g)) + K * g; };
  Expr first = qp_k(Q.apply_raw(testfn)) - Q.apply_raw(pq_k(testfn));
  Expr second = P.apply_raw(qp_k(testfn)) - pq_k(P.apply_raw(testfn));
  return {normalize(first), normalize(second)};
}

}  // namespace eidforge
