#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "eidforge/expr.hpp"

namespace eidforge {

using Substitution = std::map<std::string, Expr>;

/// Canonical form of `e`.
///
/// The result is a single fraction over "atoms" (symbols, exp/trig
/// kernels, radicals, opaque powers and integrals) with cos and sinh
/// cleared from denominators. Equal inputs modulo
/// sin^2+cos^2=1, cosh^2-sinh^2=1, exp(u)exp(v)=exp(u+v) and radical
/// squaring produce structurally identical outputs.
Expr normalize(const Expr& e);

/// True when `e` normalizes to 0.
bool is_zero(const Expr& e);
bool equivalent(const Expr& a, const Expr& b);

/// Simultaneous replacement of symbols by expressions, then normalize.
Expr substitute(const Expr& e, const Substitution& bindings);
/// Same replacement without normalizing.
Expr substitute_raw(const Expr& e, const Substitution& bindings);

/// d/dvar, normalized.
Expr differentiate(const Expr& e, std::string_view var = "x");
/// d/dvar with only light simplification; keeps shared subtrees shared.
Expr derivative(const Expr& e, std::string_view var = "x");
Expr nth_derivative(const Expr& e, int n, std::string_view var = "x");

/// Numerator and denominator of the canonical form.
std::pair<Expr, Expr> as_fraction(const Expr& e);

/// Every base raised to a negative power somewhere in `e`, integrands
/// included, used to locate poles numerically.
std::vector<Expr> denominators(const Expr& e);

/// Antiderivative from the fixed pattern table, or nullopt.
std::optional<Expr> antiderivative(const Expr& e, std::string_view var = "x");
/// Table antiderivative if one is known, else an unevaluated integral.
Expr integrate(const Expr& e, std::string_view var = "x");
/// exp(integral of e), with the table closing k*u'/u to u^k.
Expr exp_of_integral(const Expr& e, std::string_view var = "x");

enum class ReductionKernel { Sech, Csch, Sec, Csc };

/// Closed antiderivative of kernel(arg)^(2(n+1)) with respect to arg.
Expr reduction_formula(ReductionKernel kernel, unsigned n, const Expr& arg);

/// Drops cached canonical forms (memory only; results do not change).
void clear_normalize_cache();

}  // namespace eidforge
