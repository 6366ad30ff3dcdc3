#include "eidforge/diffop.hpp"

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/serialize.hpp"

namespace eidforge {

FirstOrderOp::FirstOrderOp(Expr beta, Expr alpha) : beta_(std::move(beta)), alpha_(std::move(alpha)) {
  if (is_zero(beta_)) throw ValidationError("first-order operator needs a nonzero coefficient of D");
}

FirstOrderOp FirstOrderOp::shift(const Expr& alpha) { return FirstOrderOp(Expr(1), normalize(-alpha)); }

FirstOrderOp FirstOrderOp::p_operator(const Expr& alpha, const Expr& beta) { return FirstOrderOp(beta, alpha); }

FirstOrderOp FirstOrderOp::q_operator(const Expr& alpha, const Expr& beta) {
  return FirstOrderOp(beta, normalize(-alpha - derivative(beta)));
}

Expr FirstOrderOp::apply_raw(const Expr& f) const { return beta_ * derivative(f) + alpha_ * f; }

Expr FirstOrderOp::apply(const Expr& f) const { return normalize(apply_raw(f)); }

namespace {

std::string factor(const FirstOrderOp& op, bool latex) {
  auto show = [&](const Expr& e) { return latex ? eidforge::to_latex(e) : eidforge::to_text(e); };
  std::string d = "D";
  std::string head = op.beta().is_one() ? d : "(" + show(op.beta()) + ")" + (latex ? " " : "*") + d;
  if (op.alpha().is_zero()) return head;
  Expr neg = normalize(-op.alpha());
  std::string body = head + " - " + show(neg);
  if (neg.is(NodeKind::Sum)) body = head + " - " + (latex ? "\\left(" + show(neg) + "\\right)" : "(" + show(neg) + ")");
  return latex ? "\\left(" + body + "\\right)" : "(" + body + ")";
}

}  // namespace

std::string FirstOrderOp::to_text() const { return factor(*this, false); }
std::string FirstOrderOp::to_latex() const { return factor(*this, true); }

Expr OperatorChain::apply(const Expr& f) const {
  Expr out = f;
  for (const auto& op : ops_) out = op.apply(out);
  return out;
}

Expr OperatorChain::apply_raw(const Expr& f) const {
  Expr out = f;
  for (const auto& op : ops_) out = op.apply_raw(out);
  return out;
}

std::string OperatorChain::to_text() const {
  if (ops_.empty()) return "1";
  std::string s;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) s += it->to_text();
  return s;
}

std::string OperatorChain::to_latex() const {
  if (ops_.empty()) return "1";
  std::string s;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) s += it->to_latex();
  return s;
}

Expr apply(const FirstOrderOp& op, const Expr& f) { return op.apply(f); }

Expr apply_chain(const OperatorChain& chain, const Expr& f) { return chain.apply(f); }

Expr riccati_residual(const Expr& alpha, const Expr& a0, const Expr& lambda) {
  return normalize(derivative(alpha) + alpha * alpha + a0 - lambda);
}

Expr solution_from_factorization(const Expr& alpha1, const Expr& alpha2, const Expr& c1, const Expr& c2) {
  Expr e1 = exp_of_integral(normalize(alpha1));
  Expr e2 = exp_of_integral(normalize(alpha2 - alpha1));
  Expr inner = integrate(e2);
  return e1 * (c1 + c2 * inner);
}

}  // namespace eidforge
