#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eidforge/calculus.hpp"
#include "eidforge/diffop.hpp"
#include "eidforge/eid.hpp"
#include "eidforge/numeric.hpp"

namespace eidforge {

enum class FamilyKind { Rational, Exponential, Hyperbolic, Trigonometric };
enum class SeedForm { Expon, Hyp, Trig };

std::string to_string(FamilyKind kind);
std::string to_string(SeedForm form);
/// Accepts rational|exponential|hyperbolic|trigonometric and lin|expon|hyp|trig.
FamilyKind parse_family(std::string_view name);
SeedForm parse_seed_form(std::string_view name);

struct FamilySpec {
  FamilyKind kind = FamilyKind::Hyperbolic;
  unsigned n = 1;
  Expr a = Expr(1);
  Expr b = Expr(0);
  Expr m = Expr(1);
  Expr l = Expr::parameter("l");
  SeedForm seed_form = SeedForm::Expon;
  Expr c1 = Expr::parameter("c1");
  Expr c2 = Expr::parameter("c2");
  /// Sign assumed for a symbolic l (+1 or -1); ignored when l is a number.
  int l_sign = 1;
};

/// Preset families 1 to 5: 1 rational x,
/// 2 cosh, 3 sinh, 4 cos, 5 sin (all with m = 1).
FamilySpec preset(int number, unsigned n, Expr l = Expr::parameter("l"));

/// Throws ValidationError for m = 0, a = b = 0, an l that makes the chain
/// lose a solution, or a seed form whose sign condition on l fails.
void validate(const FamilySpec& spec);

struct BaseEigenfunction {
  Expr ytilde0;
  Expr log_derivative;
};

/// ax+b, a e^{mx} + b e^{-mx}, a cosh mx + b sinh mx or a cos mx + b sin mx.
BaseEigenfunction base_eigenfunction(const FamilySpec& spec);

/// l + V with the equation y'' - (l + V) y = 0, unnormalized, in the
/// printed shape of the family.
Expr family_bracket(const FamilySpec& spec);

/// The family equation as y'' + A y = 0 with A = -(l + V) and spectral
/// part -l.
NormalODE potential(const FamilySpec& spec);

/// Solution of y0'' - l y0 = 0 in the given form.
Expr seed_solution(SeedForm form, const Expr& l, const Expr& c1, const Expr& c2);

/// ytilde0^power * (op)^iterations, with op = (1/ytilde0) D, or
/// op = D (1/ytilde0) when derivative_first is set.
struct IteratedForm {
  Expr ytilde0;
  unsigned power = 1;
  unsigned iterations = 1;
  bool derivative_first = false;

  Expr apply(const Expr& f) const;
  std::string to_text() const;
  std::string to_latex() const;
};

enum class IdentityForm {
  /// prod_{k=n}^{0} (D - k a0) = y~^{n+1} ((1/y~) D)^{n+1}
  WithD,
  /// prod_{k=n}^{1} (D - k a0) = y~^{n} (D (1/y~))^{n}
  WithoutD,
};

/// The factor side of an identity; ops()[0] is applied first.
OperatorChain factor_chain(const FamilySpec& spec, IdentityForm form = IdentityForm::WithD);
IteratedForm iterated_form(const FamilySpec& spec, IdentityForm form = IdentityForm::WithD);

struct SolutionOperator {
  IteratedForm closed;
  OperatorChain chain;
};
SolutionOperator solution_operator(const FamilySpec& spec);

/// The (eigenfunction, eigenvalue) steps building the family from
/// y0'' - l y0 = 0: (1, 0) then (y~^k, lambda_k) for k = 1..n.
std::vector<std::pair<Expr, Expr>> chain_steps(const FamilySpec& spec);
/// lambda_k: m^2 k^2, -m^2 k^2 for trigonometric, 0 for rational.
Expr step_eigenvalue(const FamilySpec& spec, unsigned k);

std::optional<Expr> resonant_lambda(const FamilySpec& spec);
bool is_resonant(const FamilySpec& spec);
/// Values of l other than the resonance at which the chain has a kernel
/// on the seed space.
std::vector<Expr> degenerate_lambdas(const FamilySpec& spec);

/// Closed iterated form applied to the seed solution.
Expr family_solution(const FamilySpec& spec);
/// y~^{n+1} ((1/y~) D)^{n+1} D^{-1} y0, with D^{-1} from the integration table.
Expr family_solution_antiderivative(const FamilySpec& spec);
/// y := y0'; for i = 1..n: y := y' - i a0 y.
Expr family_solution_loop(const FamilySpec& spec);

/// y~^{n+1} (c1 + c2 int y~^{-2(n+1)} dx), or c1 y~^{n+1} + c2 y~^{-n} for
/// the rational family. Throws ValidationError off resonance.
Expr degenerate_solution(const FamilySpec& spec);

/// Antiderivative of kernel(x)^{2(n+1)}.
Expr reduction_integral(ReductionKernel kernel, unsigned n);

/// Max |chain side - iterated side| over `points` for test function f.
double identity_residual(const FamilySpec& spec, const Expr& testfn, const std::vector<double>& points,
                         const Point& bindings = {}, IdentityForm form = IdentityForm::WithD);

}  // namespace eidforge
