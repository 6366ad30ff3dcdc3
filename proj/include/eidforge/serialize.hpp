#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "eidforge/expr.hpp"

namespace eidforge {

/// One-line parenthesized prefix form, e.g. (+ (* 2 x) (^ (cosh x) -2)).
/// `x` is the variable; other identifiers are parameters.
std::string to_prefix(const Expr& e);
/// Inverse of to_prefix; the result is structurally equal to the printed tree.
Expr parse_prefix(std::string_view text);

std::string to_latex(const Expr& e);
/// Plain infix text, e.g. l - 2/cosh(x)^2.
std::string to_text(const Expr& e);

/// Writes to_text(e).
std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace eidforge
