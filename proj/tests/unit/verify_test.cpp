#include <gtest/gtest.h>

#include <cmath>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/families.hpp"
#include "eidforge/numeric.hpp"
#include "eidforge/verify.hpp"

using namespace eidforge;

namespace {

const Expr x = symbols::x();
const Expr l = symbols::param("l");
const Expr lam = symbols::param("lambda");
const Expr c1 = symbols::param("c1");
const Expr c2 = symbols::param("c2");

long double at(const Expr& e, double xv, Point p = {}) {
  p["x"] = xv;
  return eval_numeric(e, p).value;
}

}  // namespace

TEST(SamplePoints, InsideWindowAndDeterministic) {
  Window w{0.2, 1.7};
  auto a = sample_points(w, 25, 3);
  EXPECT_EQ(a, sample_points(w, 25, 3));
  EXPECT_NE(a, sample_points(w, 25, 4));
  ASSERT_EQ(a.size(), 25U);
  for (double v : a) {
    EXPECT_GT(v, w.lo);
    EXPECT_LT(v, w.hi);
  }
}

TEST(SampleBindings, CoversEverySymbolInRange) {
  Point p = sample_bindings({"a", "b", "l"}, 2);
  ASSERT_EQ(p.size(), 3U);
  for (const auto& [k, v] : p) {
    EXPECT_GE(v, 0.6) << k;
    EXPECT_LE(v, 1.6) << k;
  }
  EXPECT_EQ(parameters_of({x * l + c1, sin(lam * x)}), (std::set<std::string>{"c1", "l", "lambda"}));
}

TEST(Residual, GeneratingEquation) {
  NormalODE ode(-l, -l);
  VerificationReport r = residual(ode, exp(sqrt(l) * x), {{"l", 2.0}});
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_EQ(static_cast<int>(r.per_point.size()), VerifyOptions{}.points);
  EXPECT_EQ(r.passed, r.max_residual < r.tolerance);
}

TEST(Residual, WorkedTwoStepSolution) {
  Expr s = x * cos(x) - sin(x);
  Expr l2 = pow(lam, 2);
  NormalODE ode(l2 - Expr(2) * (pow(x, 2) - pow(sin(x), 2)) / pow(s, 2));
  Expr y2 =
      c1 * (-l2 * x * cos(lam * x) * cos(x) + (l2 - Expr(1)) * cos(lam * x) * sin(x) - lam * x * sin(lam * x) * sin(x)) / s +
      c2 * (-l2 * x * cos(x) * sin(lam * x) + (l2 - Expr(1)) * sin(lam * x) * sin(x) + lam * x * cos(lam * x) * sin(x)) / s;
  VerificationReport r = residual(ode, y2, {{"lambda", 1.0}, {"c1", 1.0}, {"c2", 1.0}});
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_residual, 1e-8);
}

TEST(Residual, WrongSignPotentialFails) {
  FamilySpec s;  // hyperbolic, n = 1, a = 1, b = 0, m = 1
  Expr y = family_solution(s);
  NormalODE wrong(-(l + Expr(2) / pow(cosh(x), 2)));
  Point b{{"l", 2.0}, {"c1", 0.7}, {"c2", 1.3}};
  EXPECT_TRUE(residual(potential(s), y, b).passed);
  VerificationReport r = residual(wrong, y, b);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_residual, 1e-3);
}

TEST(Residual, ReportIsDeterministic) {
  NormalODE ode(-l, -l);
  Point b{{"l", 1.7}};
  VerificationReport r1 = residual(ode, cosh(sqrt(l) * x), b);
  VerificationReport r2 = residual(ode, cosh(sqrt(l) * x), b);
  EXPECT_EQ(r1.per_point, r2.per_point);
  EXPECT_EQ(r1.max_residual, r2.max_residual);
}

TEST(Residual, ShiftsAwayFromPoles) {
  // y = 1/x solves y'' - (2/x^2) y = 0; the preferred window straddles 0.
  VerifyOptions o;
  o.window = {-1.0, 1.5};
  VerificationReport r = residual(NormalODE(-Expr(2) / pow(x, 2)), Expr(1) / x, {}, o);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.window.lo < 0 && r.window.hi > 0);
}

TEST(Wronskian, CosSin) {
  VerificationReport r = wronskian_check(cos(x), sin(x), {});
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(static_cast<double>(at(cos(x) * derivative(sin(x)) - sin(x) * derivative(cos(x)), 0.9)), 1.0, 1e-15);
}

TEST(Wronskian, EulerPair) {
  Expr y1 = pow(x, 2), y2 = pow(x, -1);
  VerificationReport r = wronskian_check(y1, y2, {});
  EXPECT_TRUE(r.passed);
  Expr w = y1 * derivative(y2) - y2 * derivative(y1);
  for (double xv : {0.7, 1.3, 2.9}) EXPECT_NEAR(static_cast<double>(at(w, xv)), -3.0, 1e-14);
}

TEST(Wronskian, DependentPairFails) {
  Expr y = exp(x) + sin(x);
  EXPECT_FALSE(wronskian_check(y, Expr(2) * y, {}).passed);
}

TEST(Wronskian, NonConstantFails) {
  // x and x^2 do not solve a common normal-form equation.
  EXPECT_FALSE(wronskian_check(x, pow(x, 2), {}).passed);
}

TEST(OperatorIdentity, IdentityChainIsExact) {
  OperatorForm id = [](const Expr& f) { return f; };
  VerificationReport r = operator_identity_check(id, id, {sin(x), exp(x)}, {});
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_residual, 0.0);
}

TEST(OperatorIdentity, ExponentialFamilyIdentity) {
  FamilySpec s;
  s.kind = FamilyKind::Exponential;
  s.a = 1;
  s.b = 1;
  s.m = 1;
  s.n = 3;
  OperatorChain chain = factor_chain(s);
  IteratedForm it = iterated_form(s);
  VerifyOptions o;
  o.tolerance = 1e-9;
  VerificationReport r = operator_identity_check([&](const Expr& f) { return chain.apply_raw(f); },
                                                 [&](const Expr& f) { return it.apply(f); }, {sin(x)}, {}, o);
  EXPECT_TRUE(r.passed) << r.max_residual;
}

TEST(OperatorIdentity, WrongPowerFails) {
  FamilySpec s;
  s.kind = FamilyKind::Hyperbolic;
  s.a = Expr::rational(3, 2);
  s.b = Expr::rational(1, 2);
  s.n = 2;
  OperatorChain chain = factor_chain(s);
  IteratedForm it = iterated_form(s);
  it.power = s.n;
  VerificationReport r = operator_identity_check([&](const Expr& f) { return chain.apply_raw(f); },
                                                 [&](const Expr& f) { return it.apply(f); }, {sin(x)}, {});
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_residual, 1e-3);
}

TEST(Constancy, FirstIntegralLikeExpressions) {
  EXPECT_TRUE(constancy_check(pow(sin(x), 2) + pow(cos(x), 2), {}).passed);
  EXPECT_TRUE(constancy_check(pow(cosh(x), 2) - pow(sinh(x), 2), {}).passed);
  EXPECT_FALSE(constancy_check(x, {}).passed);
}

TEST(Quadrature, SechSquared) {
  long double err = 0;
  long double v = quadrature(pow(cosh(x), -2), {}, 0.0, 1.0, default_precision(), &err);
  EXPECT_NEAR(static_cast<double>(v), std::tanh(1.0), 1e-15);
  EXPECT_LT(static_cast<double>(err), 1e-11);
}

TEST(Quadrature, SechFourthMatchesReductionFormula) {
  Expr F = reduction_formula(ReductionKernel::Sech, 1, x);
  long double v = quadrature(pow(cosh(x), -4), {}, 0.0, 1.0);
  EXPECT_NEAR(static_cast<double>(v), static_cast<double>(at(F, 1.0) - at(F, 0.0)), 1e-10);
}

TEST(Quadrature, CscSquaredMatchesCotangent) {
  long double v = quadrature(pow(sin(x), -2), {}, 0.5, 1.0);
  EXPECT_NEAR(static_cast<double>(v), (-1 / std::tan(1.0)) - (-1 / std::tan(0.5)), 1e-10);
}

TEST(Quadrature, UsesBindingsAndVariable) {
  long double v = quadrature(l * pow(lam, 2), {{"l", 3.0}}, 0.0, 2.0, default_precision(), nullptr, "lambda");
  EXPECT_NEAR(static_cast<double>(v), 8.0, 1e-14);
}

TEST(Quadrature, PoleInsideThrows) {
  EXPECT_THROW(quadrature(Expr(1) / (x - Expr::rational(1, 2)), {}, 0.0, 1.0), PoleError);
}

TEST(FindWindow, KeepsPoleFreePreferredWindow) {
  Window w = find_window({exp(x) * sin(x)}, {}, Window{0.5, 3.0});
  EXPECT_EQ(w.lo, 0.5);
  EXPECT_EQ(w.hi, 3.0);
}

TEST(FindWindow, AvoidsPoles) {
  Window w = find_window({Expr(1) / (x - Expr(1))}, {}, Window{0.5, 3.0});
  EXPECT_NEAR(w.hi - w.lo, 2.5, 1e-12);
  EXPECT_FALSE(w.lo <= 1.0 && w.hi >= 1.0);
}

TEST(FindWindow, AvoidsZerosInsideIntegrands) {
  // 3 cos x + sin x vanishes at x = -atan 3.
  Expr f = integral(Expr(1) / (Expr(3) * cos(x) + sin(x)));
  Window w = find_window({f}, {}, Window{-2.0, 0.0});
  double z = -std::atan(3.0);
  EXPECT_FALSE(w.lo <= z && w.hi >= z) << w.lo << " " << w.hi;
}

TEST(FindWindow, DensePolesThrow) {
  EXPECT_THROW(find_window({Expr(1) / sin(Expr(50) * x)}, {}, Window{0.5, 3.0}), WindowError);
}
