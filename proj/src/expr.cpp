#include "eidforge/expr.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <utility>

#include "eidforge/errors.hpp"

namespace eidforge {

namespace detail {

struct Node {
  NodeKind kind{};
  FunctionKind function{};
  mpq_class value;
  std::string name;
  std::vector<Expr> operands;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_mpz(mpz_srcptr z) {
  std::size_t h = static_cast<std::size_t>(mpz_size(z)) * 31 + static_cast<std::size_t>(mpz_sgn(z) + 1);
  if (mpz_size(z) > 0) h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z, 0)));
  if (mpz_size(z) > 1) h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z, 1)));
  return h;
}

}  // namespace

}  // namespace detail

namespace {

using detail::Node;

const Expr& zero_expr() {
  static const Expr z{0};
  return z;
}

int kind_rank(NodeKind k) {
  switch (k) {
    case NodeKind::Integer:
    case NodeKind::Rational:
      return 0;
    case NodeKind::Variable:
      return 1;
    case NodeKind::Parameter:
      return 2;
    case NodeKind::SquareRoot:
      return 3;
    case NodeKind::Power:
      return 4;
    case NodeKind::Function:
      return 5;
    case NodeKind::Integral:
      return 6;
    case NodeKind::Product:
      return 7;
    case NodeKind::Sum:
      return 8;
  }
  return 9;
}

std::shared_ptr<Node> new_node(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

void finish(Node& n) {
  std::size_t h = detail::mix(static_cast<std::size_t>(n.kind) + 1, static_cast<std::size_t>(n.function));
  if (n.kind == NodeKind::Integer || n.kind == NodeKind::Rational) {
    h = detail::mix(h, detail::hash_mpz(n.value.get_num_mpz_t()));
    h = detail::mix(h, detail::hash_mpz(n.value.get_den_mpz_t()));
  }
  if (!n.name.empty()) h = detail::mix(h, std::hash<std::string>{}(n.name));
  std::size_t size = 1;
  for (const auto& op : n.operands) {
    h = detail::mix(h, op.hash());
    size += op.size();
  }
  n.hash = h;
  n.size = size;
}

}  // namespace

std::string_view function_name(FunctionKind kind) noexcept {
  switch (kind) {
    case FunctionKind::Exp:
      return "exp";
    case FunctionKind::Sin:
      return "sin";
    case FunctionKind::Cos:
      return "cos";
    case FunctionKind::Sinh:
      return "sinh";
    case FunctionKind::Cosh:
      return "cosh";
  }
  return "?";
}

Expr::Expr() : Expr(0) {}
Expr::Expr(int value) : Expr(mpq_class(value)) {}
Expr::Expr(long value) : Expr(mpq_class(value)) {}
Expr::Expr(long long value) : Expr(mpq_class(mpz_class(std::to_string(value)))) {}
Expr::Expr(const mpz_class& value) : Expr(mpq_class(value)) {}

Expr::Expr(const mpq_class& value) {
  mpq_class v = value;
  v.canonicalize();
  auto n = new_node(v.get_den() == 1 ? NodeKind::Integer : NodeKind::Rational);
  n->value = std::move(v);
  finish(*n);
  node_ = std::move(n);
}

Expr Expr::number(mpq_class value) { return Expr(value); }

Expr Expr::rational(long num, long den) {
  if (den == 0) throw StructuralError("rational with zero denominator");
  return Expr(mpq_class(num, den));
}

Expr Expr::parameter(std::string name) {
  if (name.empty()) throw StructuralError("empty parameter name");
  auto n = new_node(NodeKind::Parameter);
  n->name = std::move(name);
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::variable(std::string name) {
  if (name.empty()) throw StructuralError("empty variable name");
  auto n = new_node(NodeKind::Variable);
  n->name = std::move(name);
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0);
  auto n = new_node(NodeKind::Sum);
  n->operands = std::move(terms);
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_product(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  auto n = new_node(NodeKind::Product);
  n->operands = std::move(factors);
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_power(Expr base, Expr exponent) {
  auto n = new_node(NodeKind::Power);
  n->operands = {std::move(base), std::move(exponent)};
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_function(FunctionKind kind, Expr argument) {
  auto n = new_node(NodeKind::Function);
  n->function = kind;
  n->operands = {std::move(argument)};
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_sqrt(Expr argument) {
  auto n = new_node(NodeKind::SquareRoot);
  n->operands = {std::move(argument)};
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_integral(Expr integrand, std::string variable) {
  auto n = new_node(NodeKind::Integral);
  n->name = std::move(variable);
  n->operands = {std::move(integrand)};
  finish(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

NodeKind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_number() const noexcept {
  return node_->kind == NodeKind::Integer || node_->kind == NodeKind::Rational;
}

bool Expr::is_integer() const noexcept { return node_->kind == NodeKind::Integer; }
bool Expr::is_zero() const noexcept { return is_integer() && sgn(node_->value) == 0; }
bool Expr::is_one() const noexcept { return is_integer() && node_->value == 1; }

bool Expr::is_symbol() const noexcept {
  return node_->kind == NodeKind::Parameter || node_->kind == NodeKind::Variable;
}

bool Expr::is_function(FunctionKind f) const noexcept {
  return node_->kind == NodeKind::Function && node_->function == f;
}

const mpq_class& Expr::number_value() const {
  if (!is_number()) throw StructuralError("not a number");
  return node_->value;
}

const std::string& Expr::name() const { return node_->name; }

FunctionKind Expr::function_kind() const {
  if (node_->kind != NodeKind::Function) throw StructuralError("not a function application");
  return node_->function;
}

std::span<const Expr> Expr::operands() const noexcept { return node_->operands; }

const Expr& Expr::base() const {
  if (node_->kind != NodeKind::Power) throw StructuralError("not a power");
  return node_->operands[0];
}

const Expr& Expr::exponent() const {
  if (node_->kind != NodeKind::Power) throw StructuralError("not a power");
  return node_->operands[1];
}

const Expr& Expr::argument() const {
  if (node_->kind != NodeKind::Function && node_->kind != NodeKind::SquareRoot)
    throw StructuralError("node has no single argument");
  return node_->operands[0];
}

const Expr& Expr::integrand() const {
  if (node_->kind != NodeKind::Integral) throw StructuralError("not an integral");
  return node_->operands[0];
}

std::size_t Expr::hash() const noexcept { return node_->hash; }
std::size_t Expr::size() const noexcept { return node_->size; }

bool Expr::depends_on(std::string_view symbol) const {
  if (is_symbol()) return node_->name == symbol;
  if (node_->kind == NodeKind::Integral && node_->name == symbol) return true;
  return std::any_of(node_->operands.begin(), node_->operands.end(),
                     [&](const Expr& op) { return op.depends_on(symbol); });
}

bool Expr::contains_kind(NodeKind k) const {
  if (node_->kind == k) return true;
  return std::any_of(node_->operands.begin(), node_->operands.end(),
                     [&](const Expr& op) { return op.contains_kind(k); });
}

std::set<std::string> Expr::free_symbols() const {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.is_symbol()) out.insert(e.name());
    for (const auto& op : e.operands()) walk(op);
  };
  walk(*this);
  return out;
}

bool operator==(const Expr& a, const Expr& b) noexcept {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.function != y.function) return false;
  if (x.operands.size() != y.operands.size() || x.name != y.name) return false;
  if ((x.kind == NodeKind::Integer || x.kind == NodeKind::Rational) && x.value != y.value) return false;
  for (std::size_t i = 0; i < x.operands.size(); ++i)
    if (!(x.operands[i] == y.operands[i])) return false;
  return true;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (auto c = kind_rank(x.kind) <=> kind_rank(y.kind); c != 0) return c;
  if (a.is_number()) {
    int c = cmp(x.value, y.value);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (auto c = x.function <=> y.function; c != 0) return c;
  if (auto c = x.name.compare(y.name); c != 0)
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = x.operands.size() <=> y.operands.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.operands.size(); ++i)
    if (auto c = x.operands[i] <=> y.operands[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::pair<mpq_class, Expr> split_coefficient(const Expr& term) {
  if (term.is_number()) return {term.number_value(), Expr(1)};
  if (term.is(NodeKind::Product) && !term.operands().empty() && term.operands()[0].is_number()) {
    auto ops = term.operands();
    std::vector<Expr> rest(ops.begin() + 1, ops.end());
    Expr r = rest.size() == 1 ? rest[0] : Expr::make_product(std::move(rest));
    return {ops[0].number_value(), r};
  }
  return {mpq_class(1), term};
}

namespace {

Expr scaled(const mpq_class& c, const Expr& rest) {
  if (c == 1) return rest;
  if (rest.is_one()) return Expr(c);
  std::vector<Expr> f{Expr(c)};
  if (rest.is(NodeKind::Product)) {
    for (const auto& op : rest.operands()) f.push_back(op);
  } else {
    f.push_back(rest);
  }
  return Expr::make_product(std::move(f));
}

bool exact_root(const mpz_class& v, unsigned long q, mpz_class& out) {
  if (v < 0) {
    if (q % 2 == 0) return false;
    mpz_class pos = -v;
    if (!exact_root(pos, q, out)) return false;
    out = -out;
    return true;
  }
  return mpz_root(out.get_mpz_t(), v.get_mpz_t(), q) != 0;
}

}  // namespace

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t.is(NodeKind::Sum)) {
      for (const auto& op : t.operands()) flat.push_back(op);
    } else {
      flat.push_back(std::move(t));
    }
  }
  mpq_class constant = 0;
  std::vector<std::pair<Expr, mpq_class>> collected;
  std::unordered_map<Expr, std::size_t, ExprHash> index;
  for (const auto& t : flat) {
    if (t.is_number()) {
      constant += t.number_value();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = index.find(rest);
    if (it == index.end()) {
      index.emplace(rest, collected.size());
      collected.emplace_back(rest, c);
    } else {
      collected[it->second].second += c;
    }
  }
  std::vector<Expr> out;
  for (const auto& [rest, c] : collected)
    if (sgn(c) != 0) out.push_back(scaled(c, rest));
  if (sgn(constant) != 0) out.emplace_back(constant);
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out[0];
  return Expr::make_sum(std::move(out));
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f.is(NodeKind::Product)) {
      for (const auto& op : f.operands()) flat.push_back(op);
    } else {
      flat.push_back(std::move(f));
    }
  }
  mpq_class coefficient = 1;
  std::vector<std::pair<Expr, Expr>> powers;
  std::unordered_map<Expr, std::size_t, ExprHash> index;
  for (const auto& f : flat) {
    if (f.is_number()) {
      coefficient *= f.number_value();
      if (sgn(coefficient) == 0) return Expr(0);
      continue;
    }
    Expr b = f.is(NodeKind::Power) ? f.base() : f;
    Expr e = f.is(NodeKind::Power) ? f.exponent() : Expr(1);
    auto it = index.find(b);
    if (it == index.end()) {
      index.emplace(b, powers.size());
      powers.emplace_back(b, e);
    } else {
      Expr& acc = powers[it->second].second;
      acc = sum({acc, e});
    }
  }
  std::vector<Expr> out;
  for (const auto& [b, e] : powers) {
    Expr p = pow(b, e);
    if (p.is_number()) {
      coefficient *= p.number_value();
      if (sgn(coefficient) == 0) return Expr(0);
      continue;
    }
    if (p.is(NodeKind::Product)) {
      for (const auto& op : p.operands()) {
        if (op.is_number())
          coefficient *= op.number_value();
        else
          out.push_back(op);
      }
      continue;
    }
    out.push_back(p);
  }
  if (coefficient != 1 || out.empty()) out.insert(out.begin(), Expr(coefficient));
  if (out.size() == 1) return out[0];
  return Expr::make_product(std::move(out));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return Expr(1);
  if (base.is_zero()) {
    if (exponent.is_number() && sgn(exponent.number_value()) > 0) return Expr(0);
    if (exponent.is_number()) throw StructuralError("division by zero");
  }
  if (base.is_number() && exponent.is_number()) {
    const mpq_class& b = base.number_value();
    const mpq_class& e = exponent.number_value();
    if (e.get_den() == 1 && e.get_num().fits_slong_p()) {
      long k = e.get_num().get_si();
      mpq_class r;
      mpz_class num, den;
      unsigned long ak = static_cast<unsigned long>(k < 0 ? -k : k);
      mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), ak);
      mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), ak);
      r = k < 0 ? mpq_class(den, num) : mpq_class(num, den);
      r.canonicalize();
      return Expr(r);
    }
    if (e.get_den().fits_ulong_p() && e.get_num().fits_slong_p()) {
      unsigned long q = e.get_den().get_ui();
      mpz_class rn, rd;
      if (exact_root(b.get_num(), q, rn) && exact_root(b.get_den(), q, rd)) {
        return pow(Expr(mpq_class(rn, rd)), Expr(e.get_num()));
      }
    }
    return Expr::make_power(base, exponent);
  }
  if (base.is(NodeKind::Power) && exponent.is_integer() && base.exponent().is_number()) {
    mpq_class e = base.exponent().number_value() * exponent.number_value();
    return pow(base.base(), Expr(e));
  }
  if (base.is(NodeKind::Product) && exponent.is_integer()) {
    std::vector<Expr> f;
    for (const auto& op : base.operands()) f.push_back(pow(op, exponent));
    return product(std::move(f));
  }
  return Expr::make_power(base, exponent);
}

Expr pow(const Expr& base, long exponent) { return pow(base, Expr(exponent)); }

Expr exp(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  return Expr::make_function(FunctionKind::Exp, arg);
}

Expr sin(const Expr& arg) {
  if (arg.is_zero()) return Expr(0);
  return Expr::make_function(FunctionKind::Sin, arg);
}

Expr cos(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  return Expr::make_function(FunctionKind::Cos, arg);
}

Expr sinh(const Expr& arg) {
  if (arg.is_zero()) return Expr(0);
  return Expr::make_function(FunctionKind::Sinh, arg);
}

Expr cosh(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  return Expr::make_function(FunctionKind::Cosh, arg);
}

Expr sqrt(const Expr& arg) { return pow(arg, Expr::rational(1, 2)); }

Expr integral(const Expr& integrand, std::string variable) {
  if (integrand.is_zero()) return Expr(0);
  return Expr::make_integral(integrand, std::move(variable));
}

Expr tan(const Expr& arg) { return sin(arg) / cos(arg); }
Expr cot(const Expr& arg) { return cos(arg) / sin(arg); }
Expr sec(const Expr& arg) { return pow(cos(arg), -1); }
Expr csc(const Expr& arg) { return pow(sin(arg), -1); }
Expr tanh(const Expr& arg) { return sinh(arg) / cosh(arg); }
Expr coth(const Expr& arg) { return cosh(arg) / sinh(arg); }
Expr sech(const Expr& arg) { return pow(cosh(arg), -1); }
Expr csch(const Expr& arg) { return pow(sinh(arg), -1); }

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }
Expr operator-(const Expr& a) { return product({Expr(-1), a}); }

}  // namespace eidforge
