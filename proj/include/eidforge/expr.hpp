#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eidforge {

enum class NodeKind : std::uint8_t {
  Integer,
  Rational,
  Parameter,
  Variable,
  Sum,
  Product,
  Power,
  Function,
  SquareRoot,
  Integral,
};

enum class FunctionKind : std::uint8_t { Exp, Sin, Cos, Sinh, Cosh };

std::string_view function_name(FunctionKind kind) noexcept;

class Expr;

namespace detail {
struct Node;
}  // namespace detail

/// Immutable symbolic expression. Copies share the underlying node.
///
/// The `make_*` factories build nodes verbatim. The free functions and
/// operators further down fold constants and flatten nested sums and
/// products, but never reorder terms; canonical ordering is the job of
/// `normalize`.
class Expr {
 public:
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(long long value);  // NOLINT(google-explicit-constructor)
  explicit Expr(const mpz_class& value);
  explicit Expr(const mpq_class& value);

  static Expr number(mpq_class value);
  static Expr rational(long num, long den);
  static Expr parameter(std::string name);
  static Expr variable(std::string name = "x");

  static Expr make_sum(std::vector<Expr> terms);
  static Expr make_product(std::vector<Expr> factors);
  static Expr make_power(Expr base, Expr exponent);
  static Expr make_function(FunctionKind kind, Expr argument);
  static Expr make_sqrt(Expr argument);
  static Expr make_integral(Expr integrand, std::string variable = "x");

  NodeKind kind() const noexcept;
  bool is_number() const noexcept;
  bool is_integer() const noexcept;
  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  bool is_symbol() const noexcept;
  bool is(NodeKind k) const noexcept { return kind() == k; }
  bool is_function(FunctionKind f) const noexcept;

  const mpq_class& number_value() const;
  const std::string& name() const;
  FunctionKind function_kind() const;
  std::span<const Expr> operands() const noexcept;
  const Expr& base() const;
  const Expr& exponent() const;
  const Expr& argument() const;
  const Expr& integrand() const;

  std::size_t hash() const noexcept;
  std::size_t size() const noexcept;
  const void* id() const noexcept { return node_.get(); }

  bool depends_on(std::string_view symbol) const;
  bool contains_kind(NodeKind k) const;
  /// Names of every Parameter and Variable in the tree.
  std::set<std::string> free_symbols() const;

  friend bool operator==(const Expr& a, const Expr& b) noexcept;
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

// Simplifying builders.
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, long exponent);
Expr exp(const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
Expr sinh(const Expr& arg);
Expr cosh(const Expr& arg);
Expr sqrt(const Expr& arg);
Expr integral(const Expr& integrand, std::string variable = "x");

// Display-level helpers, rewritten over the five kernels.
Expr tan(const Expr& arg);
Expr cot(const Expr& arg);
Expr sec(const Expr& arg);
Expr csc(const Expr& arg);
Expr tanh(const Expr& arg);
Expr coth(const Expr& arg);
Expr sech(const Expr& arg);
Expr csch(const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

/// Splits a term into its rational coefficient and remaining factor.
std::pair<mpq_class, Expr> split_coefficient(const Expr& term);

namespace symbols {
inline Expr x() { return Expr::variable("x"); }
inline Expr param(std::string name) { return Expr::parameter(std::move(name)); }
}  // namespace symbols

}  // namespace eidforge
