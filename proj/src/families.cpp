#include "eidforge/families.hpp"

#include <cmath>

#include "eidforge/errors.hpp"
#include "eidforge/serialize.hpp"

namespace eidforge {

namespace {

const Expr& X() {
  static const Expr x = symbols::x();
  return x;
}

Expr nn1(unsigned n) { return Expr(static_cast<long>(n) * (static_cast<long>(n) + 1)); }

int sign_of(const FamilySpec& spec) {
  if (spec.l.is_number()) return sgn(spec.l.number_value());
  return spec.l_sign < 0 ? -1 : 1;
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Rational:
      return "rational";
    case FamilyKind::Exponential:
      return "exponential";
    case FamilyKind::Hyperbolic:
      return "hyperbolic";
    case FamilyKind::Trigonometric:
      return "trigonometric";
  }
  return "";
}

std::string to_string(SeedForm form) {
  switch (form) {
    case SeedForm::Expon:
      return "expon";
    case SeedForm::Hyp:
      return "hyp";
    case SeedForm::Trig:
      return "trig";
  }
  return "";
}

FamilyKind parse_family(std::string_view name) {
  if (name == "rational" || name == "lin") return FamilyKind::Rational;
  if (name == "exponential" || name == "expon") return FamilyKind::Exponential;
  if (name == "hyperbolic" || name == "hyp") return FamilyKind::Hyperbolic;
  if (name == "trigonometric" || name == "trig") return FamilyKind::Trigonometric;
  throw ValidationError("unknown family '" + std::string(name) + "'");
}

SeedForm parse_seed_form(std::string_view name) {
  if (name == "expon") return SeedForm::Expon;
  if (name == "hyp") return SeedForm::Hyp;
  if (name == "trig") return SeedForm::Trig;
  throw ValidationError("unknown seed form '" + std::string(name) + "'");
}

FamilySpec preset(int number, unsigned n, Expr l) {
  FamilySpec s;
  s.n = n;
  s.l = std::move(l);
  switch (number) {
    case 1:
      s.kind = FamilyKind::Rational;
      break;
    case 2:
      s.kind = FamilyKind::Hyperbolic;
      break;
    case 3:
      s.kind = FamilyKind::Hyperbolic;
      s.a = 0;
      s.b = 1;
      break;
    case 4:
      s.kind = FamilyKind::Trigonometric;
      break;
    case 5:
      s.kind = FamilyKind::Trigonometric;
      s.a = 0;
      s.b = 1;
      break;
    default:
      throw ValidationError("preset number must be 1..5");
  }
  return s;
}

Expr step_eigenvalue(const FamilySpec& spec, unsigned k) {
  Expr k2 = Expr(static_cast<long>(k) * static_cast<long>(k));
  switch (spec.kind) {
    case FamilyKind::Rational:
      return Expr(0);
    case FamilyKind::Exponential:
    case FamilyKind::Hyperbolic:
      return normalize(k2 * spec.m * spec.m);
    case FamilyKind::Trigonometric:
      return normalize(-k2 * spec.m * spec.m);
  }
  return Expr(0);
}

std::optional<Expr> resonant_lambda(const FamilySpec& spec) { return step_eigenvalue(spec, spec.n + 1); }

bool is_resonant(const FamilySpec& spec) { return is_zero(spec.l - *resonant_lambda(spec)); }

std::vector<Expr> degenerate_lambdas(const FamilySpec& spec) {
  std::vector<Expr> out;
  if (spec.kind == FamilyKind::Rational) return out;
  out.push_back(Expr(0));
  for (unsigned k = 1; k <= spec.n; ++k) out.push_back(step_eigenvalue(spec, k));
  return out;
}

void validate(const FamilySpec& spec) {
  if (spec.kind != FamilyKind::Rational && is_zero(spec.m)) throw ValidationError("m must be nonzero");
  if (is_zero(spec.a) && is_zero(spec.b)) throw ValidationError("a and b must not both vanish");
  if (is_resonant(spec)) return;
  for (const auto& v : degenerate_lambdas(spec))
    if (is_zero(spec.l - v))
      throw ValidationError("l = " + to_text(v) + " makes the chain annihilate a seed solution");
  int s = sign_of(spec);
  switch (spec.seed_form) {
    case SeedForm::Trig:
      if (s >= 0) throw ValidationError("trig seed needs l < 0");
      break;
    case SeedForm::Hyp:
      if (s <= 0) throw ValidationError("hyp seed needs l > 0");
      break;
    case SeedForm::Expon:
      if (s <= 0) throw ValidationError("expon seed needs l > 0 for real solutions");
      break;
  }
}

BaseEigenfunction base_eigenfunction(const FamilySpec& spec) {
  const Expr& x = X();
  Expr mx = spec.m * x;
  Expr y;
  switch (spec.kind) {
    case FamilyKind::Rational:
      y = spec.a * x + spec.b;
      break;
    case FamilyKind::Exponential:
      y = spec.a * exp(mx) + spec.b * exp(-mx);
      break;
    case FamilyKind::Hyperbolic:
      y = spec.a * cosh(mx) + spec.b * sinh(mx);
      break;
    case FamilyKind::Trigonometric:
      y = spec.a * cos(mx) + spec.b * sin(mx);
      break;
  }
  return {y, normalize(derivative(y) / y)};
}

Expr family_bracket(const FamilySpec& spec) {
  if (spec.n == 0) return spec.l;
  Expr y = base_eigenfunction(spec).ytilde0;
  Expr inv2 = pow(y, -2);
  const Expr& a = spec.a;
  const Expr& b = spec.b;
  Expr m2 = pow(spec.m, 2);
  switch (spec.kind) {
    case FamilyKind::Rational:
      return spec.l + nn1(spec.n) * pow(a, 2) * inv2;
    case FamilyKind::Exponential:
      return spec.l - Expr(4) * a * b * m2 * nn1(spec.n) * inv2;
    case FamilyKind::Hyperbolic:
      return spec.l - nn1(spec.n) * m2 * (pow(a, 2) - pow(b, 2)) * inv2;
    case FamilyKind::Trigonometric:
      return spec.l + nn1(spec.n) * m2 * (pow(a, 2) + pow(b, 2)) * inv2;
  }
  return spec.l;
}

NormalODE potential(const FamilySpec& spec) {
  if (is_zero(spec.a) && is_zero(spec.b)) throw ValidationError("a and b must not both vanish");
  if (spec.kind != FamilyKind::Rational && is_zero(spec.m)) throw ValidationError("m must be nonzero");
  Expr bracket = family_bracket(spec);
  NormalODE ode(-bracket, -spec.l);
  ode.display = bracket;
  return ode;
}

Expr seed_solution(SeedForm form, const Expr& l, const Expr& c1, const Expr& c2) {
  const Expr& x = X();
  switch (form) {
    case SeedForm::Expon: {
      Expr k = sqrt(l);
      return c1 * exp(k * x) + c2 * exp(-k * x);
    }
    case SeedForm::Hyp: {
      Expr k = sqrt(l);
      return c1 * cosh(k * x) + c2 * sinh(k * x);
    }
    case SeedForm::Trig: {
      Expr k = sqrt(-l);
      return c1 * cos(k * x) + c2 * sin(k * x);
    }
  }
  return Expr(0);
}

Expr IteratedForm::apply(const Expr& f) const {
  Expr g = f;
  for (unsigned i = 0; i < iterations; ++i)
    g = derivative_first ? normalize(derivative(g / ytilde0)) : normalize(derivative(g) / ytilde0);
  return normalize(pow(ytilde0, static_cast<long>(power)) * g);
}

std::string IteratedForm::to_text() const {
  std::string y = eidforge::to_text(ytilde0);
  std::string op = derivative_first ? "(D (1/(" + y + ")))" : "((1/(" + y + ")) D)";
  return "(" + y + ")^" + std::to_string(power) + " " + op + "^" + std::to_string(iterations);
}

std::string IteratedForm::to_latex() const {
  std::string y = eidforge::to_latex(ytilde0);
  std::string inv = "\\frac{1}{" + y + "}";
  std::string op = derivative_first ? "\\left(D " + inv + "\\right)" : "\\left(" + inv + " D\\right)";
  return "\\left(" + y + "\\right)^{" + std::to_string(power) + "}" + op + "^{" + std::to_string(iterations) + "}";
}

OperatorChain factor_chain(const FamilySpec& spec, IdentityForm form) {
  Expr a0 = base_eigenfunction(spec).log_derivative;
  OperatorChain chain;
  for (unsigned k = form == IdentityForm::WithD ? 0 : 1; k <= spec.n; ++k)
    chain.push_back(FirstOrderOp::shift(normalize(Expr(static_cast<long>(k)) * a0)));
  return chain;
}

IteratedForm iterated_form(const FamilySpec& spec, IdentityForm form) {
  Expr y = base_eigenfunction(spec).ytilde0;
  if (form == IdentityForm::WithD) return {y, spec.n + 1, spec.n + 1, false};
  return {y, spec.n, spec.n, true};
}

SolutionOperator solution_operator(const FamilySpec& spec) {
  return {iterated_form(spec, IdentityForm::WithD), factor_chain(spec, IdentityForm::WithD)};
}

std::vector<std::pair<Expr, Expr>> chain_steps(const FamilySpec& spec) {
  Expr y = base_eigenfunction(spec).ytilde0;
  std::vector<std::pair<Expr, Expr>> steps{{Expr(1), Expr(0)}};
  for (unsigned k = 1; k <= spec.n; ++k) steps.emplace_back(pow(y, static_cast<long>(k)), step_eigenvalue(spec, k));
  return steps;
}

Expr family_solution(const FamilySpec& spec) {
  validate(spec);
  return iterated_form(spec).apply(seed_solution(spec.seed_form, spec.l, spec.c1, spec.c2));
}

Expr family_solution_antiderivative(const FamilySpec& spec) {
  validate(spec);
  Expr y0 = seed_solution(spec.seed_form, spec.l, spec.c1, spec.c2);
  return iterated_form(spec).apply(integrate(normalize(y0)));
}

Expr family_solution_loop(const FamilySpec& spec) {
  validate(spec);
  Expr a0 = base_eigenfunction(spec).log_derivative;
  Expr y = normalize(derivative(seed_solution(spec.seed_form, spec.l, spec.c1, spec.c2)));
  for (unsigned i = 1; i <= spec.n; ++i) y = normalize(derivative(y) - Expr(static_cast<long>(i)) * a0 * y);
  return y;
}

Expr degenerate_solution(const FamilySpec& spec) {
  if (!is_resonant(spec)) throw ValidationError("l is not the resonant value " + to_text(*resonant_lambda(spec)));
  if (is_zero(spec.a) && is_zero(spec.b)) throw ValidationError("a and b must not both vanish");
  Expr y = base_eigenfunction(spec).ytilde0;
  long n = static_cast<long>(spec.n);
  if (spec.kind == FamilyKind::Rational) return spec.c1 * pow(y, n + 1) + spec.c2 * pow(y, -n);
  Expr j = integrate(pow(y, -2 * (n + 1)));
  return pow(y, n + 1) * (spec.c1 + spec.c2 * j);
}

Expr reduction_integral(ReductionKernel kernel, unsigned n) { return reduction_formula(kernel, n, X()); }

double identity_residual(const FamilySpec& spec, const Expr& testfn, const std::vector<double>& points,
                         const Point& bindings, IdentityForm form) {
  // Both sides stay unnormalized so the comparison does not lean on the
  // canonical form.
  Expr lhs = factor_chain(spec, form).apply_raw(testfn);
  IteratedForm it = iterated_form(spec, form);
  Expr g = testfn;
  for (unsigned i = 0; i < it.iterations; ++i) g = it.derivative_first ? derivative(g / it.ytilde0) : derivative(g) / it.ytilde0;
  Expr rhs = pow(it.ytilde0, static_cast<long>(it.power)) * g;
  double worst = 0;
  for (double x : points) {
    Point p = bindings;
    p["x"] = x;
    Evaluator ev(p);
    worst = std::max(worst, static_cast<double>(std::fabs(ev(lhs) - ev(rhs))));
  }
  return worst;
}

}  // namespace eidforge
