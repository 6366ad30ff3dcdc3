#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace eidforge::detail {

// Small exact rational used for monomial exponents.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n) : num(n) {}  // NOLINT(google-explicit-constructor)
  Rat(std::int64_t n, std::int64_t d);

  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }
  mpq_class to_mpq() const;
  static bool from_mpq(const mpq_class& q, Rat& out);

  friend Rat operator+(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a, const Rat& b);
  friend Rat operator*(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a) { return Rat(-a.num, a.den); }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend int cmp(const Rat& a, const Rat& b);
  friend bool operator<(const Rat& a, const Rat& b) { return cmp(a, b) < 0; }
};

using Var = std::uint32_t;

// Sorted by variable, no zero exponents.
using Mono = std::vector<std::pair<Var, Rat>>;

Mono mono_mul(const Mono& a, const Mono& b);
Mono mono_div(const Mono& a, const Mono& b);
Mono mono_pow(const Mono& a, const Rat& k);
Rat mono_exp(const Mono& m, Var v);
Mono mono_without(const Mono& m, Var v);
bool mono_divides(const Mono& a, const Mono& b);

// Lexicographic with the highest variable most significant.
int mono_cmp(const Mono& a, const Mono& b);

struct MonoGreater {
  bool operator()(const Mono& a, const Mono& b) const { return mono_cmp(a, b) > 0; }
};

class Poly {
 public:
  using Terms = std::map<Mono, mpq_class, MonoGreater>;

  Poly() = default;
  explicit Poly(const mpq_class& c);
  static Poly var(Var v, const Rat& e = Rat(1));
  static Poly monomial(const Mono& m, const mpq_class& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  mpq_class constant_value() const;
  const Mono& lead_mono() const { return terms_.begin()->first; }
  const mpq_class& lead_coeff() const { return terms_.begin()->second; }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Mono& m, const mpq_class& c);
  std::set<Var> vars() const;
  bool has_var(Var v) const;
  // Highest exponent of v; 0 when absent.
  Rat degree(Var v) const;
  Rat min_degree(Var v) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const mpq_class& c) const;
  Poly times_mono(const Mono& m) const;
  Poly pow(unsigned k) const;

  friend bool operator==(const Poly& a, const Poly& b);
  std::size_t hash() const;

 private:
  Terms terms_;
};

// Coefficients of P viewed as a polynomial in v (integer exponents).
std::map<std::int64_t, Poly> split_by(const Poly& p, Var v);

// Rescales exponents of each variable by an integer so that all become
// integers.
struct ExponentMap {
  std::map<Var, std::int64_t> scale;
  void include(const Poly& p);
  Poly forward(const Poly& p) const;
  Poly backward(const Poly& p) const;
};

// Monomial of per-variable minimum exponents, restricted to `which`.
Mono min_mono(const Poly& p, const std::set<Var>& which);

// The content-free gcd of two polynomials with non-negative integer
// exponents, normalized to be Z-primitive with positive leading coefficient.
Poly poly_gcd(const Poly& a, const Poly& b);
// Exact division; throws std::logic_error if b does not divide a.
Poly exact_div(const Poly& a, const Poly& b);
Poly primitive_z(const Poly& p);
// Rational content so that p = content * primitive_z(p).
mpq_class rational_content(const Poly& p);

}  // namespace eidforge::detail
