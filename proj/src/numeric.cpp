#include "eidforge/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <unordered_map>

#include "eidforge/errors.hpp"
#include "eidforge/serialize.hpp"

namespace eidforge {

namespace {

using Mp = boost::multiprecision::mpfr_float;

template <class Real>
Real from_mpz(const mpz_class& z) {
  if constexpr (std::is_same_v<Real, long double>) {
    if (z.fits_slong_p()) return static_cast<long double>(z.get_si());
    return std::strtold(z.get_str().c_str(), nullptr);
  } else {
    return Real(z.get_str());
  }
}

template <class Real>
Real from_mpq(const mpq_class& q) {
  return from_mpz<Real>(q.get_num()) / from_mpz<Real>(q.get_den());
}

template <class Real>
Real ipow(Real b, long k) {
  bool inv = k < 0;
  unsigned long n = static_cast<unsigned long>(inv ? -k : k);
  Real r(1);
  while (n) {
    if (n & 1UL) r *= b;
    n >>= 1UL;
    if (n) b *= b;
  }
  return inv ? Real(1) / r : r;
}

std::string short_text(const Expr& e) {
  std::string s = to_text(e);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

long double eval_at(const Expr& e, const Point& point, unsigned bits, double base);

template <class Real>
class Eval {
 public:
  Eval(const Point& p, unsigned bits, double base) : bits_(bits), base_(base), raw_(p) {
    for (const auto& [k, v] : p) point_.emplace(k, Real(v));
  }

  Real value(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second.second;
    Real v = compute(e);
    memo_.emplace(e.id(), std::make_pair(e, v));
    return v;
  }

 private:
  unsigned bits_;
  double base_;
  Point raw_;
  std::map<std::string, Real> point_;
  std::unordered_map<const void*, std::pair<Expr, Real>> memo_;
  std::unordered_map<const void*, Real> magnitude_;

  double x_at() const {
    auto it = raw_.find("x");
    return it == raw_.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }

  Real magnitude(const Expr& e) {
    if (!e.is(NodeKind::Sum)) {
      using std::abs;
      return abs(value(e));
    }
    auto it = magnitude_.find(e.id());
    if (it != magnitude_.end()) return it->second;
    Real m(0);
    for (const auto& t : e.operands()) {
      using std::abs;
      m += abs(value(t));
    }
    magnitude_.emplace(e.id(), m);
    return m;
  }

  void check_pole(const Expr& base, const Real& b) {
    using std::abs;
    Real eps = std::numeric_limits<Real>::epsilon();
    if constexpr (!std::is_same_v<Real, long double>) eps = boost::multiprecision::pow(Real(2), -static_cast<int>(bits_));
    Real mag = magnitude(base);
    if (b == 0 || abs(b) <= Real(64) * eps * mag) throw PoleError(short_text(base), x_at());
  }

  Real compute(const Expr& e) {
    using std::abs;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::pow;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    switch (e.kind()) {
      case NodeKind::Integer:
      case NodeKind::Rational:
        return from_mpq<Real>(e.number_value());
      case NodeKind::Variable:
      case NodeKind::Parameter: {
        auto it = point_.find(e.name());
        if (it == point_.end()) throw UnboundSymbolError(e.name());
        return it->second;
      }
      case NodeKind::Sum: {
        Real s(0);
        for (const auto& t : e.operands()) s += value(t);
        return s;
      }
      case NodeKind::Product: {
        Real p(1);
        for (const auto& f : e.operands()) p *= value(f);
        return p;
      }
      case NodeKind::Power: {
        Real b = value(e.base());
        const Expr& x = e.exponent();
        if (x.is_integer() && x.number_value().get_num().fits_slong_p()) {
          long k = x.number_value().get_num().get_si();
          if (k < 0) check_pole(e.base(), b);
          return ipow(b, k);
        }
        Real k = value(x);
        if (k < 0) check_pole(e.base(), b);
        if (x.is_number() && b < 0) {
          const mpq_class& q = x.number_value();
          if (q.get_den() % 2 == 1) {
            Real r = pow(-b, k);
            return q.get_num() % 2 == 0 ? r : Real(-r);
          }
        }
        return pow(b, k);
      }
      case NodeKind::SquareRoot:
        return sqrt(value(e.argument()));
      case NodeKind::Function: {
        Real a = value(e.argument());
        switch (e.function_kind()) {
          case FunctionKind::Exp:
            return exp(a);
          case FunctionKind::Sin:
            return sin(a);
          case FunctionKind::Cos:
            return cos(a);
          case FunctionKind::Sinh:
            return sinh(a);
          case FunctionKind::Cosh:
            return cosh(a);
        }
        return Real(0);
      }
      case NodeKind::Integral:
        return integral(e);
    }
    return Real(0);
  }

  Real integral(const Expr& e) {
    auto it = raw_.find(e.name());
    if (it == raw_.end()) throw UnboundSymbolError(e.name());
    double hi = it->second;
    if (hi == base_) return Real(0);
    const Expr& f = e.integrand();
    Point p = raw_;
    auto g = [&](Real t) {
      Point q = p;
      if constexpr (std::is_same_v<Real, long double>) {
        // Normalized integrands cancel badly near their poles.
        q[e.name()] = static_cast<double>(t);
        return eval_at(f, q, 128, base_);
      } else {
        q[e.name()] = t.template convert_to<double>();
        Eval<Real> inner(q, bits_, base_);
        inner.point_[e.name()] = t;
        return inner.value(f);
      }
    };
    if constexpr (std::is_same_v<Real, long double>) {
      Real err;
      return boost::math::quadrature::gauss_kronrod<Real, 31>::integrate(g, Real(base_), Real(hi), 8, 1e-12L, &err);
    } else {
      // Fixed 50-digit type: its Kronrod nodes are tabulated, while a
      // runtime-precision type never meets a tight tolerance.
      using Quad = boost::multiprecision::mpfr_float_50;
      auto gq = [&](Quad t) { return Quad(g(Real(t))); };
      Quad err;
      Quad v = boost::math::quadrature::gauss_kronrod<Quad, 31>::integrate(gq, Quad(base_), Quad(hi), 8,
                                                                          Quad(1e-22), &err);
      return Real(v);
    }
  }
};

struct MpScope {
  explicit MpScope(unsigned bits) : saved_(Mp::default_precision()) {
    Mp::default_precision(static_cast<unsigned>(bits * 0.30103) + 2);
  }
  ~MpScope() { Mp::default_precision(saved_); }
  unsigned saved_;
};

long double eval_at(const Expr& e, const Point& point, unsigned bits, double base) {
  if (bits <= 64) {
    Eval<long double> ev(point, bits, base);
    return ev.value(e);
  }
  MpScope scope(bits);
  Eval<Mp> ev(point, bits, base);
  return ev.value(e).convert_to<long double>();
}

}  // namespace

unsigned default_precision() {
  if (const char* env = std::getenv("EIDFORGE_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 16 && v <= 4096) return static_cast<unsigned>(v);
  }
  return 64;
}

NumericResult eval_numeric(const Expr& e, const Point& point, unsigned precision_bits, double integral_base) {
  NumericResult r;
  r.value = eval_at(e, point, precision_bits, integral_base);
  long double hi = eval_at(e, point, std::max(128U, precision_bits * 2), integral_base);
  r.error = std::fabs(r.value - hi);
  return r;
}

std::string eval_decimal(const Expr& e, const Point& point, unsigned precision_bits, int digits,
                         double integral_base) {
  MpScope scope(std::max(precision_bits, 80U));
  Eval<Mp> ev(point, std::max(precision_bits, 80U), integral_base);
  return ev.value(e).str(digits);
}

struct Evaluator::Impl {
  unsigned bits;
  std::unique_ptr<Eval<long double>> ld;
  std::unique_ptr<Eval<Mp>> mp;
};

Evaluator::Evaluator(Point point, unsigned precision_bits, double integral_base) : impl_(std::make_unique<Impl>()) {
  impl_->bits = precision_bits;
  if (precision_bits <= 64) {
    impl_->ld = std::make_unique<Eval<long double>>(point, precision_bits, integral_base);
  } else {
    MpScope scope(precision_bits);
    impl_->mp = std::make_unique<Eval<Mp>>(point, precision_bits, integral_base);
  }
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

long double Evaluator::operator()(const Expr& e) {
  if (impl_->ld) return impl_->ld->value(e);
  MpScope scope(impl_->bits);
  return impl_->mp->value(e).convert_to<long double>();
}

long double quadrature(const Expr& integrand, const Point& bindings, double lo, double hi, unsigned precision_bits,
                       long double* error, const std::string& var) {
  Expr in = Expr::make_integral(integrand, var);
  Point p = bindings;
  p[var] = hi;
  long double v = eval_at(in, p, precision_bits, lo);
  if (error) {
    long double v2 = eval_at(in, p, std::max(128U, precision_bits * 2), lo);
    *error = std::fabs(v - v2);
  }
  return v;
}

}  // namespace eidforge
