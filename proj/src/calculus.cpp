#include <unordered_map>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"

namespace eidforge {

namespace {

class Deriver {
 public:
  explicit Deriver(std::string_view var) : var_(var) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second.second;
    Expr d = compute(e);
    memo_.emplace(e.id(), std::make_pair(e, d));
    return d;
  }

 private:
  std::string var_;
  std::unordered_map<const void*, std::pair<Expr, Expr>> memo_;

  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Integer:
      case NodeKind::Rational:
      case NodeKind::Parameter:
        return Expr(0);
      case NodeKind::Variable:
        return Expr(e.name() == var_ ? 1 : 0);
      case NodeKind::Sum: {
        std::vector<Expr> t;
        for (const auto& op : e.operands()) t.push_back((*this)(op));
        return sum(std::move(t));
      }
      case NodeKind::Product: {
        auto ops = e.operands();
        std::vector<Expr> t;
        for (std::size_t i = 0; i < ops.size(); ++i) {
          Expr di = (*this)(ops[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> f;
          for (std::size_t j = 0; j < ops.size(); ++j) f.push_back(j == i ? di : ops[j]);
          t.push_back(product(std::move(f)));
        }
        return sum(std::move(t));
      }
      case NodeKind::Power: {
        const Expr& b = e.base();
        const Expr& x = e.exponent();
        Expr db = (*this)(b);
        Expr dx = (*this)(x);
        if (dx.is_zero()) {
          if (db.is_zero()) return Expr(0);
          return product({x, pow(b, x - Expr(1)), db});
        }
        if (b.is_function(FunctionKind::Exp)) {
          Expr du = (*this)(b.argument());
          return product({e, dx * b.argument() + x * du});
        }
        throw StructuralError("derivative of a power with variable exponent needs a logarithm");
      }
      case NodeKind::SquareRoot: {
        Expr du = (*this)(e.argument());
        if (du.is_zero()) return Expr(0);
        return product({Expr::rational(1, 2), du, pow(e, -1)});
      }
      case NodeKind::Function: {
        const Expr& u = e.argument();
        Expr du = (*this)(u);
        if (du.is_zero()) return Expr(0);
        switch (e.function_kind()) {
          case FunctionKind::Exp:
            return product({e, du});
          case FunctionKind::Sin:
            return product({cos(u), du});
          case FunctionKind::Cos:
            return product({Expr(-1), sin(u), du});
          case FunctionKind::Sinh:
            return product({cosh(u), du});
          case FunctionKind::Cosh:
            return product({sinh(u), du});
        }
        return Expr(0);
      }
      case NodeKind::Integral:
        if (e.name() == var_) return e.integrand();
        return integral((*this)(e.integrand()), e.name());
    }
    return Expr(0);
  }
};

// Slope a when u = a*var + b, else nullopt.
std::optional<Expr> linear_slope(const Expr& u, std::string_view var) {
  if (!u.depends_on(var)) return std::nullopt;
  Expr a = differentiate(u, var);
  if (a.depends_on(var) || a.is_zero()) return std::nullopt;
  return a;
}

std::optional<Expr> table(const Expr& e, std::string_view var);

std::optional<Expr> power_rule(const Expr& base, const Expr& k, std::string_view var) {
  if (k.depends_on(var)) return std::nullopt;
  if (base.is(NodeKind::Function)) {
    FunctionKind fk = base.function_kind();
    auto slope = linear_slope(base.argument(), var);
    if (!slope) return std::nullopt;
    if (fk == FunctionKind::Exp) return pow(base, k) / (k * *slope);
    if (!k.is_integer()) return std::nullopt;
    mpz_class kv = k.number_value().get_num();
    if (kv >= 0 || kv % 2 != 0) return std::nullopt;
    unsigned n = static_cast<unsigned>(-kv.get_si() / 2 - 1);
    ReductionKernel rk{};
    switch (fk) {
      case FunctionKind::Cosh:
        rk = ReductionKernel::Sech;
        break;
      case FunctionKind::Sinh:
        rk = ReductionKernel::Csch;
        break;
      case FunctionKind::Cos:
        rk = ReductionKernel::Sec;
        break;
      case FunctionKind::Sin:
        rk = ReductionKernel::Csc;
        break;
      default:
        return std::nullopt;
    }
    return reduction_formula(rk, n, base.argument()) / *slope;
  }
  auto slope = linear_slope(base, var);
  if (!slope) return std::nullopt;
  if (k.is_number() && k.number_value() == -1) return std::nullopt;
  return pow(base, k + Expr(1)) / ((k + Expr(1)) * *slope);
}

std::optional<Expr> table(const Expr& e, std::string_view var) {
  if (!e.depends_on(var)) return e * Expr::variable(std::string(var));
  switch (e.kind()) {
    case NodeKind::Variable:
      return product({Expr::rational(1, 2), pow(e, 2)});
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      for (const auto& t : e.operands()) {
        auto r = table(t, var);
        if (!r) return std::nullopt;
        parts.push_back(*r);
      }
      return sum(std::move(parts));
    }
    case NodeKind::Product: {
      std::vector<Expr> constant, dependent;
      for (const auto& f : e.operands()) (f.depends_on(var) ? dependent : constant).push_back(f);
      if (dependent.size() != 1) return std::nullopt;
      auto r = table(dependent[0], var);
      if (!r) return std::nullopt;
      constant.push_back(*r);
      return product(std::move(constant));
    }
    case NodeKind::Power:
      return power_rule(e.base(), e.exponent(), var);
    case NodeKind::SquareRoot:
      return power_rule(e.argument(), Expr::rational(1, 2), var);
    case NodeKind::Function: {
      auto slope = linear_slope(e.argument(), var);
      if (!slope) return std::nullopt;
      const Expr& u = e.argument();
      switch (e.function_kind()) {
        case FunctionKind::Exp:
          return e / *slope;
        case FunctionKind::Sin:
          return -cos(u) / *slope;
        case FunctionKind::Cos:
          return sin(u) / *slope;
        case FunctionKind::Sinh:
          return cosh(u) / *slope;
        case FunctionKind::Cosh:
          return sinh(u) / *slope;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

// u^c when t = c*u'/u for some factor u^-1 of t.
std::optional<Expr> log_derivative_match(const Expr& t, std::string_view var) {
  std::vector<Expr> candidates;
  auto consider = [&](const Expr& f) {
    if (f.is(NodeKind::Power) && f.exponent().is_number() && f.exponent().number_value() < 0) {
      const mpq_class& k = f.exponent().number_value();
      candidates.push_back(k == -1 ? f.base() : pow(f.base(), Expr(mpq_class(-k))));
    }
  };
  if (t.is(NodeKind::Product)) {
    for (const auto& f : t.operands()) consider(f);
  } else {
    consider(t);
  }
  for (const auto& u : candidates) {
    Expr du = derivative(u, var);
    if (is_zero(du)) continue;
    Expr c = normalize(t * u / du);
    if (!c.depends_on(var)) return pow(u, c);
  }
  return std::nullopt;
}

}  // namespace

Expr derivative(const Expr& e, std::string_view var) {
  Deriver d(var);
  return d(e);
}

Expr differentiate(const Expr& e, std::string_view var) { return normalize(derivative(e, var)); }

Expr nth_derivative(const Expr& e, int n, std::string_view var) {
  Expr out = e;
  for (int i = 0; i < n; ++i) out = derivative(out, var);
  return out;
}

std::optional<Expr> antiderivative(const Expr& e, std::string_view var) {
  if (auto r = table(e, var)) return r;
  Expr n = normalize(e);
  if (!(n == e)) return table(n, var);
  return std::nullopt;
}

Expr integrate(const Expr& e, std::string_view var) {
  if (auto r = antiderivative(e, var)) return *r;
  return integral(normalize(e), std::string(var));
}

Expr exp_of_integral(const Expr& e, std::string_view var) {
  Expr n = e;
  std::vector<Expr> terms;
  if (n.is(NodeKind::Sum)) {
    for (const auto& t : n.operands()) terms.push_back(t);
  } else {
    terms.push_back(n);
  }
  std::vector<Expr> factors;
  std::vector<Expr> rest;
  Expr linear_part(0);
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    if (!t.depends_on(var)) {
      linear_part = linear_part + t;
      continue;
    }
    if (auto m = log_derivative_match(t, var)) {
      factors.push_back(*m);
      continue;
    }
    rest.push_back(t);
  }
  if (!rest.empty()) {
    Expr nn = normalize(e);
    if (!(nn == e)) return exp_of_integral(nn, var);
  }
  if (!linear_part.is_zero()) factors.push_back(exp(linear_part * Expr::variable(std::string(var))));
  if (!rest.empty()) factors.push_back(exp(integrate(sum(rest), var)));
  return product(std::move(factors));
}

Expr reduction_formula(ReductionKernel kernel, unsigned n, const Expr& arg) {
  Expr c(1);
  std::vector<Expr> inner;
  auto k_pow = [&](unsigned p) {
    switch (kernel) {
      case ReductionKernel::Sech:
        return pow(cosh(arg), -static_cast<long>(p));
      case ReductionKernel::Csch:
        return pow(sinh(arg), -static_cast<long>(p));
      case ReductionKernel::Sec:
        return pow(cos(arg), -static_cast<long>(p));
      case ReductionKernel::Csc:
        return pow(sin(arg), -static_cast<long>(p));
    }
    return Expr(1);
  };
  bool csch = kernel == ReductionKernel::Csch;
  inner.push_back(csch ? -k_pow(2 * n + 1) : k_pow(2 * n + 1));
  mpq_class ck = 1;
  for (unsigned k = 1; k <= n; ++k) {
    ck *= mpq_class(2 * (n - k + 1), 2 * n - 2 * k + 1);
    mpq_class signed_ck = (csch && (k % 2 == 0)) ? mpq_class(-ck) : ck;
    inner.push_back(product({Expr(signed_ck), k_pow(2 * n - 2 * k + 1)}));
  }
  Expr lead;
  switch (kernel) {
    case ReductionKernel::Sech:
      lead = sinh(arg);
      break;
    case ReductionKernel::Csch:
      lead = cosh(arg);
      break;
    case ReductionKernel::Sec:
      lead = sin(arg);
      break;
    case ReductionKernel::Csc:
      lead = -cos(arg);
      break;
  }
  return product({Expr(mpq_class(1, 2 * n + 1)), lead, sum(std::move(inner))});
}

}  // namespace eidforge
