#include <gtest/gtest.h>

#include <cmath>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/families.hpp"
#include "eidforge/numeric.hpp"
#include "eidforge/serialize.hpp"
#include "eidforge/verify.hpp"

using namespace eidforge;

namespace {

const Expr x = symbols::x();
const Expr l = symbols::param("l");

FamilySpec spec(FamilyKind k, unsigned n, Expr a, Expr b, Expr m = Expr(1), Expr lv = symbols::param("l")) {
  FamilySpec s;
  s.kind = k;
  s.n = n;
  s.a = std::move(a);
  s.b = std::move(b);
  s.m = std::move(m);
  s.l = std::move(lv);
  return s;
}

std::vector<double> window_points(const FamilySpec& s, const Point& b = {}) {
  Expr y = base_eigenfunction(s).ytilde0;
  return sample_points(find_window({pow(y, -1)}, b, Window{0.5, 3.0}), 10);
}

}  // namespace

TEST(Families, ParseNamesAndAliases) {
  EXPECT_EQ(parse_family("lin"), FamilyKind::Rational);
  EXPECT_EQ(parse_family("expon"), FamilyKind::Exponential);
  EXPECT_EQ(parse_family("hyp"), FamilyKind::Hyperbolic);
  EXPECT_EQ(parse_family("trigonometric"), FamilyKind::Trigonometric);
  EXPECT_THROW(parse_family("bessel"), ValidationError);
  EXPECT_EQ(parse_seed_form("trig"), SeedForm::Trig);
  EXPECT_EQ(to_string(FamilyKind::Hyperbolic), "hyperbolic");
}

TEST(Families, Validation) {
  EXPECT_THROW(validate(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(0))), ValidationError);
  EXPECT_THROW(validate(spec(FamilyKind::Rational, 1, Expr(0), Expr(0))), ValidationError);
  FamilySpec trig_seed = spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(1), Expr(2));
  trig_seed.seed_form = SeedForm::Trig;
  EXPECT_THROW(validate(trig_seed), ValidationError);
  trig_seed.l = Expr(-2);
  EXPECT_NO_THROW(validate(trig_seed));
  // l = 1 is the first step eigenvalue for m = 1 and would annihilate a seed.
  EXPECT_THROW(validate(spec(FamilyKind::Hyperbolic, 2, Expr(1), Expr(0), Expr(1), Expr(1))), ValidationError);
  EXPECT_NO_THROW(validate(spec(FamilyKind::Hyperbolic, 2, Expr(1), Expr(0), Expr(1), Expr(9))));
}

TEST(Families, Potentials) {
  EXPECT_EQ(potential(spec(FamilyKind::Rational, 1, Expr(1), Expr(0))).coeff, normalize(-(l + Expr(2) / pow(x, 2))));
  EXPECT_EQ(potential(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0))).coeff,
            normalize(-(l - Expr(2) * pow(cosh(x), -2))));
  EXPECT_EQ(potential(spec(FamilyKind::Trigonometric, 2, Expr(0), Expr(1))).coeff,
            normalize(-(l + Expr(6) / pow(sin(x), 2))));
  Expr a = symbols::param("a"), b = symbols::param("b"), m = symbols::param("m");
  Expr e = exp(m * x) * a + b * exp(-m * x);
  EXPECT_EQ(potential(spec(FamilyKind::Exponential, 1, a, b, m)).coeff,
            normalize(-(l - Expr(8) * a * b * m * m / pow(e, 2))));
}

TEST(Families, PresetsSpecializeGeneralForms) {
  // 1: l + n(n+1)/x^2, 2: l - n(n+1)/cosh^2, 3: l + n(n+1)/sinh^2, 4: l + n(n+1)/cos^2, 5: l + n(n+1)/sin^2
  Expr nn = Expr(12);
  std::vector<Expr> expected{l + nn / pow(x, 2), l - nn / pow(cosh(x), 2), l + nn / pow(sinh(x), 2),
                             l + nn / pow(cos(x), 2), l + nn / pow(sin(x), 2)};
  for (int i = 1; i <= 5; ++i)
    EXPECT_EQ(potential(preset(i, 3)).coeff, normalize(-expected[i - 1])) << i;
}

TEST(Families, SeedSolutions) {
  for (auto [form, lv] : {std::pair{SeedForm::Expon, l}, {SeedForm::Hyp, l}, {SeedForm::Trig, l}}) {
    Expr y = seed_solution(form, lv, symbols::param("c1"), symbols::param("c2"));
    EXPECT_TRUE(is_zero(derivative(derivative(y)) - lv * y)) << to_text(y);
  }
  EXPECT_EQ(seed_solution(SeedForm::Expon, l, Expr(1), Expr(0)), exp(sqrt(l) * x));
}

TEST(Families, SolutionOperatorForms) {
  FamilySpec r = spec(FamilyKind::Rational, 2, Expr(1), Expr(0));
  SolutionOperator op = solution_operator(r);
  EXPECT_EQ(op.closed.power, 3U);
  EXPECT_EQ(op.closed.iterations, 3U);
  EXPECT_EQ(op.closed.ytilde0, x);
  EXPECT_EQ(op.chain.size(), 3U);

  FamilySpec z = spec(FamilyKind::Trigonometric, 0, Expr(2), Expr(1));
  SolutionOperator op0 = solution_operator(z);
  ASSERT_EQ(op0.chain.size(), 1U);
  EXPECT_TRUE(op0.chain.ops()[0].alpha().is_zero());
  EXPECT_EQ(op0.closed.apply(sin(x) * exp(x)), normalize(derivative(sin(x) * exp(x))));
}

TEST(Families, ResonantLambda) {
  EXPECT_EQ(*resonant_lambda(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0))), Expr(4));
  EXPECT_EQ(*resonant_lambda(spec(FamilyKind::Trigonometric, 0, Expr(1), Expr(0), Expr(2))), Expr(-4));
  EXPECT_EQ(*resonant_lambda(spec(FamilyKind::Rational, 3, Expr(1), Expr(0))), Expr(0));
}

TEST(Families, DegenerateSolutions) {
  Expr c1 = symbols::param("c1"), c2 = symbols::param("c2");
  Expr a = symbols::param("a"), b = symbols::param("b");
  FamilySpec r = spec(FamilyKind::Rational, 2, a, b, Expr(1), Expr(0));
  EXPECT_EQ(degenerate_solution(r), c1 * pow(a * x + b, 3) + c2 * pow(a * x + b, -2));

  FamilySpec h = spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(1), Expr(4));
  Expr hy = degenerate_solution(h);
  EXPECT_FALSE(hy.contains_kind(NodeKind::Integral)) << hy;
  EXPECT_TRUE(is_zero(hy - pow(cosh(x), 2) * (c1 + c2 * reduction_integral(ReductionKernel::Sech, 1))));

  FamilySpec t = spec(FamilyKind::Trigonometric, 1, Expr(0), Expr(1), Expr(1), Expr(-4));
  Expr ty = degenerate_solution(t);
  EXPECT_FALSE(ty.contains_kind(NodeKind::Integral)) << ty;
  EXPECT_TRUE(is_zero(ty - pow(sin(x), 2) * (c1 + c2 * reduction_integral(ReductionKernel::Csc, 1))));

  EXPECT_THROW(degenerate_solution(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(1), Expr(3))),
               ValidationError);
}

TEST(Families, DegenerateSolutionResiduals) {
  for (auto k : {FamilyKind::Rational, FamilyKind::Exponential, FamilyKind::Hyperbolic, FamilyKind::Trigonometric}) {
    for (unsigned n : {0U, 2U}) {
      FamilySpec s = spec(k, n, Expr::rational(3, 2), Expr::rational(-1, 2), Expr(2));
      s.l = *resonant_lambda(s);
      VerificationReport rep =
          residual(potential(s), degenerate_solution(s), {{"c1", 0.8}, {"c2", 1.1}}, {.tolerance = 1e-9});
      EXPECT_TRUE(rep.passed) << to_string(k) << " n=" << n << " " << rep.max_residual;
    }
  }
}

TEST(Families, ReductionIntegralUsesX) {
  EXPECT_EQ(normalize(reduction_integral(ReductionKernel::Sech, 0)), normalize(tanh(x)));
}

TEST(Families, IdentityResidual) {
  FamilySpec z = spec(FamilyKind::Exponential, 0, Expr(1), Expr(1));
  EXPECT_EQ(identity_residual(z, exp(x), {0.3, 0.7, 1.1}), 0.0);
  FamilySpec r = spec(FamilyKind::Rational, 3, Expr(1), Expr(0));
  EXPECT_LT(identity_residual(r, sin(x), window_points(r)), 1e-9);
  FamilySpec h = spec(FamilyKind::Hyperbolic, 2, Expr(1), Expr(0));
  EXPECT_LT(identity_residual(h, pow(x, 2), window_points(h)), 1e-9);
  FamilySpec e = spec(FamilyKind::Exponential, 3, Expr(1), Expr(1));
  EXPECT_LT(identity_residual(e, sin(x), window_points(e)), 1e-9);
  EXPECT_LT(identity_residual(e, sin(x), window_points(e), {}, IdentityForm::WithoutD), 1e-9);
}

TEST(Families, ClosedLoopAndChainAgree) {
  for (auto k : {FamilyKind::Rational, FamilyKind::Exponential, FamilyKind::Hyperbolic, FamilyKind::Trigonometric}) {
    FamilySpec s = spec(k, 2, Expr::rational(3, 2), Expr::rational(-1, 2), Expr(2), Expr::rational(37, 10));
    Expr closed = family_solution(s);
    EXPECT_EQ(closed, family_solution_loop(s)) << to_string(k);
    GeneratedProblem p = chain(NormalODE(-s.l, -s.l), chain_steps(s), seed_solution(s.seed_form, s.l, s.c1, s.c2));
    EXPECT_EQ(closed, p.solution) << to_string(k);
    EXPECT_EQ(p.ode.coeff, potential(s).coeff) << to_string(k);
  }
}

TEST(Families, AntiderivativeVariantSpansSameSpace) {
  FamilySpec s = spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(1), Expr(2));
  Expr y = family_solution_antiderivative(s);
  VerificationReport rep = residual(potential(s), y, {{"c1", 0.4}, {"c2", 1.7}});
  EXPECT_TRUE(rep.passed) << rep.max_residual;
}

TEST(Families, ResonanceFactorization) {
  // At resonance D^2 - (n+1)^2 + n(n+1)/cosh^2 = (D + (n+1) tanh)(D - (n+1) tanh).
  for (unsigned n = 0; n <= 3; ++n) {
    Expr k = Expr(static_cast<long>(n + 1));
    Expr alpha = k * tanh(x);
    Expr f = sin(Expr(2) * x) + pow(x, 3);
    Expr lhs = FirstOrderOp::shift(-alpha).apply(FirstOrderOp::shift(alpha).apply(f));
    Expr rhs = derivative(derivative(f)) - k * k * f + Expr(static_cast<long>(n * (n + 1))) * pow(cosh(x), -2) * f;
    double worst = 0;
    for (double xv : sample_points(Window{0.1, 2.0}, 10))
      worst = std::max(worst, std::fabs(static_cast<double>(eval_numeric(lhs - rhs, {{"x", xv}}).value)));
    EXPECT_LT(worst, 1e-9) << n;
  }
}
