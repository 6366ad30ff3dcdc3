#include "eidforge/serialize.hpp"

#include <cctype>
#include <map>
#include <ostream>
#include <sstream>

#include "eidforge/errors.hpp"

namespace eidforge {

namespace {

void prefix_rec(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Integer:
    case NodeKind::Rational:
      out += e.number_value().get_str();
      return;
    case NodeKind::Variable:
      if (e.name() == "x") {
        out += "x";
      } else {
        out += "(var " + e.name() + ")";
      }
      return;
    case NodeKind::Parameter:
      if (e.name() == "x") {
        out += "(param x)";
      } else {
        out += e.name();
      }
      return;
    case NodeKind::Sum:
    case NodeKind::Product:
      out += e.is(NodeKind::Sum) ? "(+" : "(*";
      for (const auto& op : e.operands()) {
        out += ' ';
        prefix_rec(op, out);
      }
      out += ')';
      return;
    case NodeKind::Power:
      out += "(^ ";
      prefix_rec(e.base(), out);
      out += ' ';
      prefix_rec(e.exponent(), out);
      out += ')';
      return;
    case NodeKind::Function:
      out += '(';
      out += function_name(e.function_kind());
      out += ' ';
      prefix_rec(e.argument(), out);
      out += ')';
      return;
    case NodeKind::SquareRoot:
      out += "(sqrt ";
      prefix_rec(e.argument(), out);
      out += ')';
      return;
    case NodeKind::Integral:
      out += "(int ";
      prefix_rec(e.integrand(), out);
      out += ' ' + e.name() + ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse_all() {
    Expr e = parse();
    skip();
    if (pos_ != s_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string token() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_) throw ParseError("expected a token", pos_);
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  Expr atom() {
    std::size_t at = pos_;
    std::string t = token();
    bool numeric = std::isdigit(static_cast<unsigned char>(t[0])) ||
                   (t.size() > 1 && t[0] == '-' && std::isdigit(static_cast<unsigned char>(t[1])));
    if (numeric) {
      mpq_class q;
      if (q.set_str(t, 10) != 0 || q.get_den() == 0) throw ParseError("bad number '" + t + "'", at);
      if (q.get_den() != 1) {
        mpq_class c = q;
        c.canonicalize();
        if (c.get_num() != q.get_num() || c.get_den() != q.get_den())
          throw ParseError("non-canonical rational '" + t + "'", at);
      }
      return Expr(q);
    }
    if (t == "x") return Expr::variable("x");
    return Expr::parameter(t);
  }

  Expr parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    if (s_[pos_] == ')') throw ParseError("unexpected ')'", pos_);
    if (s_[pos_] != '(') return atom();
    ++pos_;
    std::size_t at = pos_;
    std::string head = token();
    std::vector<Expr> args;
    if (head == "var" || head == "param") {
      std::string name = token();
      expect(')');
      return head == "var" ? Expr::variable(name) : Expr::parameter(name);
    }
    if (head == "int") {
      Expr f = parse();
      std::string v = token();
      expect(')');
      return Expr::make_integral(f, v);
    }
    while (!peek(')')) {
      if (pos_ >= s_.size()) throw ParseError("unterminated list", pos_);
      args.push_back(parse());
    }
    expect(')');
    auto arity = [&](std::size_t n) {
      if (args.size() != n) throw ParseError("wrong arity for '" + head + "'", at);
    };
    if (head == "+") return Expr::make_sum(std::move(args));
    if (head == "*") return Expr::make_product(std::move(args));
    if (head == "^") {
      arity(2);
      return Expr::make_power(args[0], args[1]);
    }
    if (head == "sqrt") {
      arity(1);
      return Expr::make_sqrt(args[0]);
    }
    static const std::map<std::string, FunctionKind> fns{{"exp", FunctionKind::Exp},
                                                         {"sin", FunctionKind::Sin},
                                                         {"cos", FunctionKind::Cos},
                                                         {"sinh", FunctionKind::Sinh},
                                                         {"cosh", FunctionKind::Cosh}};
    auto it = fns.find(head);
    if (it == fns.end()) throw ParseError("unknown operator '" + head + "'", at);
    arity(1);
    return Expr::make_function(it->second, args[0]);
  }
};

struct Style {
  bool latex;
};

enum Prec { kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

std::string print(const Expr& e, const Style& st, int ctx);

std::string latex_name(const std::string& n) {
  static const std::map<std::string, std::string> greek{
      {"lambda", "\\lambda"}, {"alpha", "\\alpha"}, {"beta", "\\beta"},  {"mu", "\\mu"},
      {"nu", "\\nu"},         {"ell", "\\ell"},     {"kappa", "\\kappa"}, {"omega", "\\omega"}};
  auto it = greek.find(n);
  if (it != greek.end()) return it->second;
  std::size_t i = n.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(n[i - 1]))) --i;
  if (i > 0 && i < n.size()) return n.substr(0, i) + "_{" + n.substr(i) + "}";
  return n;
}

std::string number_str(const mpq_class& q, const Style& st) {
  if (q.get_den() == 1) return q.get_num().get_str();
  if (st.latex) {
    std::string s = q < 0 ? "-" : "";
    mpz_class n = abs(q.get_num());
    return s + "\\frac{" + n.get_str() + "}{" + q.get_den().get_str() + "}";
  }
  return q.get_str();
}

bool negative_number(const Expr& e) { return e.is_number() && e.number_value() < 0; }

// Splits t into a sign and a positive-looking remainder.
bool split_sign(const Expr& t, Expr& positive) {
  if (negative_number(t)) {
    positive = Expr(mpq_class(-t.number_value()));
    return true;
  }
  if (t.is(NodeKind::Product) && !t.operands().empty() && negative_number(t.operands()[0])) {
    auto ops = t.operands();
    mpq_class c = -ops[0].number_value();
    std::vector<Expr> rest;
    if (c != 1) rest.push_back(Expr(c));
    for (std::size_t i = 1; i < ops.size(); ++i) rest.push_back(ops[i]);
    positive = rest.size() == 1 ? rest[0] : Expr::make_product(std::move(rest));
    return true;
  }
  positive = t;
  return false;
}

bool simple_argument(const Expr& a) {
  if (a.is_symbol() || a.is_number()) return !negative_number(a);
  if (a.is(NodeKind::Product)) {
    for (const auto& f : a.operands()) {
      if (f.is_number() && f.number_value() < 0) return false;
      if (!(f.is_symbol() || f.is_number() ||
            (f.is(NodeKind::Power) && f.base().is_symbol() && f.exponent().is_number())))
        return false;
    }
    return true;
  }
  return false;
}

std::string wrap(const std::string& s, const Style& st) { return st.latex ? "\\left(" + s + "\\right)" : "(" + s + ")"; }

std::string function_head(FunctionKind k, const Style& st) {
  std::string n(function_name(k));
  return st.latex ? "\\" + n : n;
}

std::string function_str(const Expr& f, const std::string& power, const Style& st) {
  const Expr& a = f.argument();
  if (f.function_kind() == FunctionKind::Exp) {
    if (st.latex) {
      std::string s = "e^{" + print(a, st, kSum) + "}";
      return power.empty() ? s : "\\left(" + s + "\\right)^{" + power + "}";
    }
    std::string s = "exp(" + print(a, st, kSum) + ")";
    return power.empty() ? s : s + "^" + power;
  }
  std::string head = function_head(f.function_kind(), st);
  if (st.latex) {
    std::string h = power.empty() ? head : head + "^{" + power + "}";
    if (simple_argument(a)) return h + " " + print(a, st, kProduct);
    return h + "\\left(" + print(a, st, kSum) + "\\right)";
  }
  std::string s = head + "(" + print(a, st, kSum) + ")";
  return power.empty() ? s : s + "^" + power;
}

std::string exponent_str(const Expr& e, const Style& st) {
  if (st.latex) return print(e, st, kSum);
  if (e.is_integer() && e.number_value() >= 0) return e.number_value().get_str();
  return "(" + print(e, st, kSum) + ")";
}

std::string power_str(const Expr& b, const Expr& ex, const Style& st) {
  if (ex.is_number() && ex.number_value() == mpq_class(1, 2)) {
    return st.latex ? "\\sqrt{" + print(b, st, kSum) + "}" : "sqrt(" + print(b, st, kSum) + ")";
  }
  if (ex.is_one()) return print(b, st, kPower);
  std::string p = exponent_str(ex, st);
  if (b.is(NodeKind::Function)) return function_str(b, p, st);
  std::string base = print(b, st, kAtom);
  return st.latex ? base + "^{" + p + "}" : base + "^" + p;
}

std::string product_str(const Expr& e, const Style& st) {
  std::vector<Expr> ops(e.operands().begin(), e.operands().end());
  if (!e.is(NodeKind::Product)) ops = {e};
  mpq_class coeff = 1;
  std::vector<std::string> num, den;
  std::vector<std::pair<Expr, mpq_class>> den_parts;
  for (const auto& f : ops) {
    if (f.is_number()) {
      coeff *= f.number_value();
      continue;
    }
    if (f.is(NodeKind::Power) && negative_number(f.exponent())) {
      den_parts.emplace_back(f.base(), -f.exponent().number_value());
      continue;
    }
    num.push_back(print(f, st, kProduct));
  }
  bool several = den_parts.size() > 1 || (coeff.get_den() != 1 && !den_parts.empty());
  for (const auto& [b, k] : den_parts) {
    if (k != 1) {
      den.push_back(power_str(b, Expr(k), st));
    } else if (st.latex) {
      den.push_back(print(b, st, several ? kProduct : kSum));
    } else {
      den.push_back(print(b, st, several ? kProduct : kAtom));
    }
  }
  bool neg = coeff < 0;
  if (neg) coeff = -coeff;
  std::string sep = st.latex ? " " : "*";
  auto join = [&](const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += sep;
      s += parts[i];
    }
    return s;
  };
  std::string out;
  if (den.empty() && coeff.get_den() == 1) {
    std::vector<std::string> parts;
    if (coeff != 1 || num.empty()) parts.push_back(coeff.get_num().get_str());
    parts.insert(parts.end(), num.begin(), num.end());
    if (st.latex && parts.size() > 1 && coeff != 1 && !num.empty() &&
        std::isdigit(static_cast<unsigned char>(parts[1][0])))
      parts[0] += " \\cdot";
    out = join(parts);
  } else {
    if (coeff.get_den() != 1) den.insert(den.begin(), coeff.get_den().get_str());
    std::vector<std::string> top;
    if (coeff.get_num() != 1 || num.empty()) top.push_back(coeff.get_num().get_str());
    top.insert(top.end(), num.begin(), num.end());
    if (st.latex) {
      out = "\\frac{" + join(top) + "}{" + join(den) + "}";
    } else {
      std::string t = top.size() > 1 ? join(top) : top[0];
      std::string d = den.size() > 1 ? "(" + join(den) + ")" : den[0];
      out = t + "/" + d;
    }
  }
  return neg ? "-" + out : out;
}

std::string print(const Expr& e, const Style& st, int ctx) {
  std::string s;
  int prec = kAtom;
  switch (e.kind()) {
    case NodeKind::Integer:
    case NodeKind::Rational:
      s = number_str(e.number_value(), st);
      if (e.number_value() < 0) prec = kSum;
      if (!e.is_integer() && !st.latex) prec = kProduct;
      break;
    case NodeKind::Variable:
    case NodeKind::Parameter:
      s = st.latex ? latex_name(e.name()) : e.name();
      break;
    case NodeKind::Sum: {
      prec = kSum;
      bool first = true;
      for (const auto& t : e.operands()) {
        Expr pos;
        bool neg = split_sign(t, pos);
        std::string body = print(pos, st, kSum + 1);
        if (first) {
          s = neg ? "-" + body : body;
        } else {
          s += neg ? " - " : " + ";
          s += body;
        }
        first = false;
      }
      break;
    }
    case NodeKind::Product: {
      prec = kProduct;
      s = product_str(e, st);
      if (!s.empty() && s[0] == '-') prec = kSum;
      break;
    }
    case NodeKind::Power:
      if (negative_number(e.exponent())) {
        s = product_str(e, st);
        prec = kProduct;
      } else {
        s = power_str(e.base(), e.exponent(), st);
        prec = kPower;
      }
      break;
    case NodeKind::Function:
      s = function_str(e, "", st);
      prec = st.latex && e.function_kind() != FunctionKind::Exp && simple_argument(e.argument()) ? kProduct : kAtom;
      break;
    case NodeKind::SquareRoot:
      s = st.latex ? "\\sqrt{" + print(e.argument(), st, kSum) + "}" : "sqrt(" + print(e.argument(), st, kSum) + ")";
      break;
    case NodeKind::Integral:
      if (st.latex) {
        s = "\\int " + print(e.integrand(), st, kProduct) + " \\, d" + e.name();
        prec = kProduct;
      } else {
        s = "int(" + print(e.integrand(), st, kSum) + ", " + e.name() + ")";
      }
      break;
  }
  if (prec < ctx) return wrap(s, st);
  return s;
}

}  // namespace

std::string to_prefix(const Expr& e) {
  std::string out;
  prefix_rec(e, out);
  return out;
}

Expr parse_prefix(std::string_view text) { return Parser(text).parse_all(); }

std::string to_latex(const Expr& e) { return print(e, Style{true}, kSum); }

std::string to_text(const Expr& e) { return print(e, Style{false}, kSum); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_text(e); }

}  // namespace eidforge
