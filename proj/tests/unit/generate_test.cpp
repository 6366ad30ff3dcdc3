#include <gtest/gtest.h>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/generate.hpp"
#include "eidforge/serialize.hpp"
#include "support/span.hpp"

using namespace eidforge;
using eidforge::testing::span_check;

namespace {

const Expr x = symbols::x();
const Expr l = symbols::param("l");
const Expr a = symbols::param("a");
const Expr b = symbols::param("b");
const Expr c1 = symbols::param("c1");
const Expr c2 = symbols::param("c2");

FamilySpec spec(FamilyKind kind, unsigned n, Expr av, Expr bv, Expr mv = Expr(1), Expr lv = symbols::param("l")) {
  FamilySpec s;
  s.kind = kind;
  s.n = n;
  s.a = std::move(av);
  s.b = std::move(bv);
  s.m = std::move(mv);
  s.l = std::move(lv);
  if (s.l.is_number() && sgn(s.l.number_value()) < 0) s.seed_form = SeedForm::Trig;
  return s;
}

GeneratedProblem gen(const FamilySpec& s, OutputForm form = OutputForm::Expanded) { return generate({s, form}); }

void expect_in_span(const Expr& p, const GeneratedProblem& g, const Point& bindings) {
  auto [g1, g2] = basis(g);
  auto r = span_check(p, g1, g2, bindings);
  EXPECT_LT(r.spread, 1e-9);
  EXPECT_LT(r.misfit, 1e-9);
  EXPECT_TRUE(std::fabs(r.alpha) > 1e-6 || std::fabs(r.beta) > 1e-6);
}

Expr sq(const Expr& e) { return pow(e, 2); }

}  // namespace

TEST(Generate, FirstWorkedExampleLatex) {
  GeneratedProblem g = gen(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0)));
  std::string tex = emit(g, OutputFormat::Latex);
  EXPECT_NE(tex.find("\\frac{2}{\\cosh^{2} x}"), std::string::npos) << tex;
  EXPECT_EQ(tex.rfind("y'' - \\left(l - ", 0), 0U) << tex;
  EXPECT_TRUE(is_zero(g.ode.coeff + l - Expr(2) / sq(cosh(x))));
}

TEST(Generate, FirstWorkedExampleSpan) {
  GeneratedProblem g = gen(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0)));
  Expr k = sqrt(l);
  Expr p1 = exp(Expr(2) * k * x) * (k * cosh(x) - sinh(x)) / (exp(k * x) * cosh(x));
  Expr p2 = -(k * cosh(x) + sinh(x)) / (exp(k * x) * cosh(x));
  for (double lv : {0.7, 2.3}) {
    expect_in_span(p1, g, {{"l", lv}});
    expect_in_span(p2, g, {{"l", lv}});
  }
}

TEST(Generate, SecondWorkedExampleSpan) {
  GeneratedProblem g = gen(spec(FamilyKind::Trigonometric, 1, a, b));
  EXPECT_TRUE(is_zero(g.ode.coeff + l + Expr(2) * (sq(a) + sq(b)) / sq(a * cos(x) + b * sin(x))));
  Expr k = sqrt(l), den = exp(k * x) * (a * cos(x) + b * sin(x));
  Expr p1 = exp(Expr(2) * k * x) * (a * k * cos(x) - b * cos(x) + b * k * sin(x) + a * sin(x)) / den;
  Expr p2 = (-a * k * cos(x) - b * cos(x) - b * k * sin(x) + a * sin(x)) / den;
  Point pt{{"l", 1.4}, {"a", 1.2}, {"b", 0.3}};
  expect_in_span(p1, g, pt);
  expect_in_span(p2, g, pt);
}

TEST(Generate, ThirdWorkedExampleSpan) {
  // The printed power of (ax+b) is n; n+1 is the one that solves the equation.
  const unsigned n = 2;
  GeneratedProblem g = gen(spec(FamilyKind::Rational, n, a, b));
  EXPECT_TRUE(is_zero(g.ode.coeff + l + Expr(6) * sq(a) / sq(a * x + b)));
  Expr u = a * x + b, k = sqrt(l);
  auto shown = [&](const Expr& seed, long power) {
    Expr h = seed;
    for (unsigned i = 0; i <= n; ++i) h = derivative(h) / u;
    return pow(u, power) * h;
  };
  Point pt{{"l", 1.9}, {"a", 0.8}, {"b", 0.35}};
  for (const Expr& seed : {exp(k * x), exp(-k * x)}) {
    expect_in_span(shown(seed, n + 1), g, pt);
    auto [g1, g2] = basis(g);
    EXPECT_GT(span_check(shown(seed, n), g1, g2, pt).spread, 1e-3);
  }
}

TEST(Generate, FourthWorkedExample) {
  GeneratedProblem g = gen(spec(FamilyKind::Trigonometric, 2, Expr(0), Expr(1)));
  EXPECT_TRUE(is_zero(g.ode.coeff + l + Expr(6) / sq(sin(x))));
  std::string tex = emit(g, OutputFormat::Latex);
  EXPECT_EQ(tex.rfind("y'' - \\left(l + \\frac{6}{\\sin^{2} x}\\right) y = 0", 0), 0U) << tex;
  Expr k = sqrt(l), s = sin(x), c = cos(x);
  Expr p1 = exp(Expr(2) * k * x) * (Expr(3) * sq(c) - Expr(3) * k * c * s + l * sq(s) + sq(s)) / (exp(k * x) * sq(s));
  Expr p2 = (Expr(3) * sq(c) + Expr(3) * k * c * s + l * sq(s) + sq(s)) / (exp(k * x) * sq(s));
  for (double lv : {0.6, 3.1}) {
    expect_in_span(p1, g, {{"l", lv}});
    expect_in_span(p2, g, {{"l", lv}});
  }
}

TEST(Generate, RationalAtZeroGivesEulerSolution) {
  for (unsigned n = 0; n <= 3; ++n) {
    GeneratedProblem g = gen(spec(FamilyKind::Rational, n, a, b, Expr(1), Expr(0)));
    EXPECT_TRUE(g.resonant);
    long k = static_cast<long>(n);
    Expr euler = c1 * pow(a * x + b, k + 1) + c2 * pow(a * x + b, -k);
    EXPECT_TRUE(is_zero(g.solution - euler)) << n << ": " << g.solution;
  }
  GeneratedProblem g = gen(spec(FamilyKind::Rational, 2, Expr(1), Expr(0), Expr(1), Expr(0)));
  EXPECT_EQ(emit(make_record(g), OutputFormat::Text), "y'' - (6/x^2) y = 0\ny = c1*x^3 + c2/x^2\n");
}

TEST(Generate, ResonanceDispatchIsExact) {
  for (auto kind : {FamilyKind::Rational, FamilyKind::Exponential, FamilyKind::Hyperbolic, FamilyKind::Trigonometric}) {
    FamilySpec s = spec(kind, 1, Expr(2), Expr(1), Expr(1));
    Expr res = *resonant_lambda(s);
    s.l = res;
    s.seed_form = sgn(res.number_value()) < 0 ? SeedForm::Trig : SeedForm::Expon;
    GeneratedProblem on = gen(s);
    EXPECT_TRUE(on.resonant) << to_string(kind);
    EXPECT_TRUE(is_zero(on.solution - degenerate_solution(s)));
    if (kind == FamilyKind::Rational) {
      s.l = Expr::rational(1, 1000);
    } else {
      s.l = normalize(res + Expr::rational(1, 1000));
    }
    GeneratedProblem off = gen(s);
    EXPECT_FALSE(off.resonant) << to_string(kind);
  }
}

TEST(Generate, ResonantSolutionsSolveTheirEquations) {
  for (auto kind : {FamilyKind::Rational, FamilyKind::Exponential, FamilyKind::Hyperbolic, FamilyKind::Trigonometric}) {
    FamilySpec s = spec(kind, 2, Expr::rational(3, 2), Expr::rational(1, 2), Expr(1));
    s.l = *resonant_lambda(s);
    s.seed_form = sgn(s.l.number_value()) < 0 ? SeedForm::Trig : SeedForm::Expon;
    GeneratedProblem g = gen(s);
    VerifyOptions o;
    o.tolerance = 1e-9;
    VerificationReport r = verify_problem(g, o);
    EXPECT_TRUE(r.passed) << to_string(kind) << " " << r.max_residual;
  }
}

TEST(Generate, SolutionsHaveTwoIndependentParts) {
  for (auto kind : {FamilyKind::Rational, FamilyKind::Exponential, FamilyKind::Hyperbolic, FamilyKind::Trigonometric}) {
    for (unsigned n = 0; n <= 3; ++n) {
      FamilySpec s = spec(kind, n, Expr::rational(3, 2), Expr::rational(-1, 2), Expr(2));
      GeneratedProblem g = gen(s);
      auto syms = g.solution.free_symbols();
      EXPECT_TRUE(syms.count("c1") && syms.count("c2")) << to_string(kind) << n;
      auto [g1, g2] = basis(g);
      VerificationReport w = wronskian_check(g1, g2, {{"l", 1.3}});
      EXPECT_TRUE(w.passed) << to_string(kind) << " n=" << n << " " << w.detail;
    }
  }
}

TEST(Generate, SeedFormsAgreeUpToConstants) {
  FamilySpec s = spec(FamilyKind::Exponential, 2, Expr(1), Expr(2), Expr(1));
  GeneratedProblem ge = gen(s);
  s.seed_form = SeedForm::Hyp;
  GeneratedProblem gh = gen(s);
  auto [h1, h2] = basis(gh);
  Point pt{{"l", 2.2}};
  auto [e1, e2] = basis(ge);
  EXPECT_LT(span_check(h1, e1, e2, pt).spread, 1e-9);
  EXPECT_LT(span_check(h2, e1, e2, pt).spread, 1e-9);
}

TEST(Generate, IsDeterministic) {
  FamilySpec s = spec(FamilyKind::Trigonometric, 3, Expr(1), Expr(2), Expr(2));
  GeneratedProblem p1 = gen(s), p2 = gen(s);
  EXPECT_EQ(p1.solution, p2.solution);
  EXPECT_EQ(p1.ode.coeff, p2.ode.coeff);
  EXPECT_EQ(to_json(make_record(p1, GenerateRequest{s})), to_json(make_record(p2, GenerateRequest{s})));
}

TEST(Generate, RejectsInvalidSpecs) {
  EXPECT_THROW(gen(spec(FamilyKind::Hyperbolic, 1, Expr(0), Expr(0))), ValidationError);
  EXPECT_THROW(gen(spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0), Expr(0))), ValidationError);
  FamilySpec s = spec(FamilyKind::Trigonometric, 1, Expr(1), Expr(0), Expr(1), Expr(2));
  s.seed_form = SeedForm::Trig;
  EXPECT_THROW(gen(s), ValidationError);
  // l = m^2 k^2 for k <= n loses a seed solution.
  EXPECT_THROW(gen(spec(FamilyKind::Hyperbolic, 2, Expr(1), Expr(0), Expr(1), Expr(4))), ValidationError);
}

TEST(Generate, TraceFollowsChainSteps) {
  FamilySpec s = spec(FamilyKind::Hyperbolic, 3, Expr(1), Expr(0));
  GeneratedProblem g = gen(s);
  ASSERT_EQ(g.trace.size(), 4U);
  auto steps = chain_steps(s);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(g.trace[i].eigenfunction, steps[i].first);
    EXPECT_TRUE(is_zero(g.trace[i].eigenvalue - steps[i].second));
  }
}

TEST(Emit, EmptyTraceIsTheGeneratingEquation) {
  GeneratedProblem g = chain(NormalODE(-l, -l), {}, seed_solution(SeedForm::Expon, l, c1, c2));
  EXPECT_TRUE(g.trace.empty());
  std::string text = emit(g, OutputFormat::Text);
  EXPECT_EQ(text.substr(0, text.find('\n')), "y0'' - l y0 = 0");
  std::string tex = emit(g, OutputFormat::Latex);
  EXPECT_EQ(tex.substr(0, tex.find('\n')), "y_{0}'' - l y_{0} = 0");
}

TEST(Emit, ChainFormKeepsOperator) {
  FamilySpec s = spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0));
  GenerateRequest req{s, OutputForm::Chain};
  GeneratedProblem g = generate(req);
  ProblemRecord r = make_record(g, req);
  ASSERT_TRUE(r.operator_form.has_value());
  ASSERT_TRUE(r.seed.has_value());
  EXPECT_EQ(r.operator_form->text, "(cosh(x))^2 ((1/(cosh(x))) D)^2");
  std::string text = emit(r, OutputFormat::Text);
  EXPECT_NE(text.find("y = (cosh(x))^2 ((1/(cosh(x))) D)^2 (c1*exp(sqrt(l)*x) + c2*exp(-sqrt(l)*x))"), std::string::npos)
      << text;
  // The operator applied to the seed is the expanded solution.
  EXPECT_TRUE(is_zero(iterated_form(s).apply(parse_prefix(r.seed->prefix)) - g.solution));
}

TEST(Emit, VerificationLine) {
  FamilySpec s = spec(FamilyKind::Rational, 1, Expr(1), Expr(0));
  GenerateRequest req{s};
  GeneratedProblem g = generate(req);
  ProblemRecord r = make_record(g, req, verify_problem(g));
  std::string text = emit(r, OutputFormat::Text);
  EXPECT_NE(text.find("\n# verified: max residual "), std::string::npos) << text;
  EXPECT_NE(emit(r, OutputFormat::Latex).find("\n% verified: "), std::string::npos);
}

TEST(Record, JsonRoundTrip) {
  std::vector<std::pair<GenerateRequest, bool>> cases{
      {{spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0))}, true},
      {{spec(FamilyKind::Rational, 2, a, b, Expr(1), Expr(0))}, false},
      {{spec(FamilyKind::Trigonometric, 2, Expr(0), Expr(1)), OutputForm::Chain}, true},
      {{spec(FamilyKind::Exponential, 1, Expr(1), Expr(2), Expr(1), Expr(-5))}, true},
  };
  for (const auto& [req, verify] : cases) {
    GeneratedProblem g = generate(req);
    std::optional<VerificationReport> rep;
    if (verify) rep = verify_problem(g, {}, req.spec.l_sign);
    ProblemRecord r = make_record(g, req, rep);
    std::string js = to_json(r);
    ProblemRecord back = record_from_json(js);
    EXPECT_EQ(back, r) << js;
    EXPECT_EQ(to_json(back), js);
    EXPECT_EQ(back.verification.has_value(), verify);
    auto [bracket, y] = record_exprs(back);
    EXPECT_EQ(y, g.solution);
    EXPECT_TRUE(is_zero(bracket + g.ode.coeff));
  }
}

TEST(Record, Schema) {
  GenerateRequest req{spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0))};
  ProblemRecord r = make_record(generate(req), req);
  EXPECT_EQ(r.version, "eid-1");
  EXPECT_EQ(r.family, "hyperbolic");
  EXPECT_EQ(r.n, 1U);
  ASSERT_EQ(r.params.size(), 4U);
  EXPECT_EQ(r.params[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(r.params[3], (std::pair<std::string, std::string>{"l", "l"}));
  EXPECT_EQ(r.trace.size(), 2U);
  EXPECT_TRUE(r.trace[0].invertible);
  EXPECT_FALSE(r.verification.has_value());
  // At l = 0 every rational step sits at its own eigenvalue.
  GenerateRequest euler{spec(FamilyKind::Rational, 2, Expr(1), Expr(0), Expr(1), Expr(0))};
  for (const auto& t : make_record(generate(euler), euler).trace) EXPECT_FALSE(t.invertible);
}

TEST(Record, MalformedInputThrows) {
  EXPECT_THROW(record_from_json("{not json"), ParseError);
  EXPECT_THROW(record_from_json("{}"), ParseError);
  GenerateRequest req{spec(FamilyKind::Rational, 1, Expr(1), Expr(0))};
  std::string js = to_json(make_record(generate(req), req));
  std::string old = js;
  old.replace(old.find("eid-1"), 5, "eid-0");
  EXPECT_THROW(record_from_json(old), ParseError);
}

TEST(Record, VerifySavedRecord) {
  GenerateRequest req{spec(FamilyKind::Trigonometric, 2, Expr(1), Expr(3), Expr(1))};
  GeneratedProblem g = generate(req);
  ProblemRecord r = record_from_json(to_json(make_record(g, req)));
  EXPECT_TRUE(verify_record(r).passed);
  ProblemRecord bad = r;
  bad.equation.prefix = to_prefix(normalize(parse_prefix(r.equation.prefix) + Expr(1)));
  VerificationReport rep = verify_record(bad);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.max_residual, 1e-3);
}

TEST(Record, NegativeSymbolicLUsesSign) {
  FamilySpec s = spec(FamilyKind::Hyperbolic, 1, Expr(1), Expr(0));
  s.seed_form = SeedForm::Trig;
  s.l_sign = -1;
  GenerateRequest req{s};
  GeneratedProblem g = generate(req);
  ProblemRecord r = make_record(g, req);
  EXPECT_EQ(r.l_sign, -1);
  VerificationReport rep = verify_record(r);
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.bindings.at("l"), 0);
}
