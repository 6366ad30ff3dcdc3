#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "poly.hpp"

namespace eidforge {

namespace {

using detail::ExponentMap;
using detail::Mono;
using detail::Poly;
using detail::Rat;
using detail::Var;

enum class AtomKind : int { Variable, Parameter, Exp, Sin, Cos, Sinh, Cosh, Root, Pow, Integral };

struct Atom {
  AtomKind kind{};
  Expr key;
  Expr key2;
  bool opaque = false;
  bool laurent = false;
  bool generator = false;
  Poly relation;
};

struct AtomId {
  AtomKind kind;
  Expr key;
  Expr key2;
  bool opaque;
  bool operator==(const AtomId& o) const {
    return kind == o.kind && opaque == o.opaque && key == o.key && key2 == o.key2;
  }
};

struct AtomIdHash {
  std::size_t operator()(const AtomId& a) const {
    return a.key.hash() * 131 + a.key2.hash() * 7 + static_cast<std::size_t>(a.kind) * 2 + (a.opaque ? 1 : 0);
  }
};

struct RF {
  Poly num;
  Poly den{mpq_class(1)};
};

using CanonMono = std::vector<std::pair<std::uint32_t, Rat>>;

int canon_cmp(const CanonMono& a, const CanonMono& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first > b[j].first)) return a[i].second.num > 0 ? 1 : -1;
    if (i == a.size() || b[j].first > a[i].first) return b[j].second.num > 0 ? -1 : 1;
    int c = cmp(a[i].second, b[j].second);
    if (c != 0) return c;
    ++i;
    ++j;
  }
  return 0;
}

class Engine {
 public:
  std::recursive_mutex mu;

  RF to_rf(const Expr& e);
  Expr to_expr(const RF& f);
  Expr poly_expr(const Poly& p) { return to_expr(RF{p, Poly(mpq_class(1))}); }

  Expr normalize(const Expr& e) {
    auto it = norm_cache_.find(e);
    if (it != norm_cache_.end()) return it->second;
    RF f = to_rf(e);
    Expr out = to_expr(f);
    remember(e, out);
    if (!(out == e)) {
      remember(out, out);
      rf_cache_.emplace(out, f);
    }
    return out;
  }

  std::pair<Expr, Expr> fraction(const Expr& e) {
    RF f = to_rf(e);
    return {poly_expr(f.num), poly_expr(f.den)};
  }

  void clear() {
    rf_cache_.clear();
    norm_cache_.clear();
  }

 private:
  std::vector<Atom> atoms_;
  std::unordered_map<AtomId, Var, AtomIdHash> index_;
  std::vector<Var> sorted_;
  std::vector<std::uint32_t> rank_;
  std::set<Var> laurent_;
  std::unordered_map<Expr, RF, ExprHash> rf_cache_;
  std::unordered_map<Expr, Expr, ExprHash> norm_cache_;
  std::map<std::pair<Var, unsigned>, Poly> relation_pow_;

  void remember(const Expr& e, const Expr& out) {
    if (norm_cache_.size() > 400000) clear();
    norm_cache_.emplace(e, out);
  }

  static int kind_rank(AtomKind k) { return static_cast<int>(k); }

  bool atom_less(Var a, Var b) const {
    const Atom& x = atoms_[a];
    const Atom& y = atoms_[b];
    if (x.kind != y.kind) return kind_rank(x.kind) < kind_rank(y.kind);
    if (auto c = x.key <=> y.key; c != 0) return c < 0;
    if (auto c = x.key2 <=> y.key2; c != 0) return c < 0;
    return x.opaque < y.opaque;
  }

  Var intern(AtomKind kind, const Expr& key, const Expr& key2 = Expr(0), bool opaque = false,
             const Poly* relation = nullptr) {
    AtomId id{kind, key, key2, opaque};
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    if (kind == AtomKind::Cos) {
      intern(AtomKind::Sin, key);
      return index_.at(id);
    }
    if (kind == AtomKind::Sinh) {
      intern(AtomKind::Cosh, key);
      return index_.at(id);
    }
    Var v = add_atom(Atom{kind, key, key2, opaque, kind == AtomKind::Exp, kind == AtomKind::Root,
                          relation ? *relation : Poly()});
    index_.emplace(id, v);
    if (kind == AtomKind::Sin) {
      Poly rel = Poly(mpq_class(1)) - Poly::var(v, Rat(2));
      Var c = add_atom(Atom{AtomKind::Cos, key, key2, false, false, true, rel});
      index_.emplace(AtomId{AtomKind::Cos, key, key2, false}, c);
    } else if (kind == AtomKind::Cosh) {
      Poly rel = Poly::var(v, Rat(2)) - Poly(mpq_class(1));
      Var s = add_atom(Atom{AtomKind::Sinh, key, key2, false, false, true, rel});
      index_.emplace(AtomId{AtomKind::Sinh, key, key2, false}, s);
    }
    return v;
  }

  Var add_atom(Atom a) {
    Var v = static_cast<Var>(atoms_.size());
    if (a.laurent) laurent_.insert(v);
    atoms_.push_back(std::move(a));
    auto pos = std::lower_bound(sorted_.begin(), sorted_.end(), v,
                                [this](Var p, Var q) { return atom_less(p, q); });
    sorted_.insert(pos, v);
    rank_.assign(atoms_.size(), 0);
    for (std::uint32_t i = 0; i < sorted_.size(); ++i) rank_[sorted_[i]] = i;
    return v;
  }

  CanonMono canon(const Mono& m) const {
    CanonMono out;
    out.reserve(m.size());
    for (const auto& [v, e] : m) out.emplace_back(rank_[v], e);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return out;
  }

  // Coefficient of the canonically greatest term.
  mpq_class canon_lead(const Poly& p) const {
    const mpq_class* best = nullptr;
    CanonMono bm;
    for (const auto& [m, c] : p.terms()) {
      CanonMono cm = canon(m);
      if (!best || canon_cmp(cm, bm) > 0) {
        best = &c;
        bm = std::move(cm);
      }
    }
    return best ? *best : mpq_class(0);
  }

  const Poly& relation_pow(Var g, unsigned k) {
    auto key = std::make_pair(g, k);
    auto it = relation_pow_.find(key);
    if (it != relation_pow_.end()) return it->second;
    Poly p = atoms_[g].relation.pow(k);
    return relation_pow_.emplace(key, std::move(p)).first->second;
  }

  Poly reduce(const Poly& p) {
    Poly cur = p;
    for (int pass = 0; pass < 16; ++pass) {
      bool changed = false;
      Poly out;
      for (const auto& [m, c] : cur.terms()) {
        bool hit = false;
        for (const auto& [v, e] : m) {
          if (!atoms_[v].generator || !e.is_integer() || e.num < 2) continue;
          Mono rest = detail::mono_without(m, v);
          if (e.num % 2 == 1) rest = detail::mono_mul(rest, Mono{{v, Rat(1)}});
          out = out + relation_pow(v, static_cast<unsigned>(e.num / 2)).times_mono(rest).scaled(c);
          hit = true;
          break;
        }
        if (hit)
          changed = true;
        else
          out.add_term(m, c);
      }
      cur = std::move(out);
      if (!changed) break;
    }
    return cur;
  }

  std::vector<Var> elimination_order(const Poly& den) const {
    std::vector<Var> roots, trig;
    for (Var v : den.vars()) {
      if (!atoms_[v].generator) continue;
      (atoms_[v].kind == AtomKind::Root ? roots : trig).push_back(v);
    }
    std::sort(roots.rbegin(), roots.rend());
    roots.insert(roots.end(), trig.begin(), trig.end());
    return roots;
  }

  void eliminate(RF& f) {
    for (int pass = 0; pass < 8; ++pass) {
      auto order = elimination_order(f.den);
      if (order.empty()) return;
      for (Var g : order) {
        if (!f.den.has_var(g)) continue;
        auto parts = detail::split_by(f.den, g);
        Poly d0 = parts.count(0) ? parts[0] : Poly();
        Poly d1 = parts.count(1) ? parts[1] : Poly();
        Poly conj = d0 - d1.times_mono(Mono{{g, Rat(1)}});
        f.num = reduce(f.num * conj);
        f.den = reduce(d0 * d0 - d1 * d1 * atoms_[g].relation);
        if (f.den.is_zero()) throw StructuralError("division by zero");
      }
    }
  }

  std::set<Var> laurent_in(const Poly& p) const {
    std::set<Var> out;
    for (Var v : p.vars())
      if (atoms_[v].laurent) out.insert(v);
    return out;
  }

  RF canonicalize(RF f, bool reduced = false) {
    if (!reduced) {
      f.num = reduce(f.num);
      f.den = reduce(f.den);
    }
    if (f.den.is_zero()) throw StructuralError("division by zero");
    if (f.num.is_zero()) return RF{};
    eliminate(f);
    if (f.den.is_constant()) {
      f.num = f.num.scaled(1 / f.den.constant_value());
      f.den = Poly(mpq_class(1));
      return f;
    }
    Mono shift = detail::min_mono(f.den, laurent_in(f.den));
    if (!shift.empty()) {
      Mono inv = detail::mono_pow(shift, Rat(-1));
      f.num = f.num.times_mono(inv);
      f.den = f.den.times_mono(inv);
    }
    if (!f.num.is_constant()) {
      ExponentMap em;
      em.include(f.num);
      em.include(f.den);
      Poly n = em.forward(f.num);
      Poly d = em.forward(f.den);
      Mono ns = detail::min_mono(n, laurent_in(n));
      if (!ns.empty()) n = n.times_mono(detail::mono_pow(ns, Rat(-1)));
      Poly g = detail::poly_gcd(n, d);
      if (!g.is_constant()) {
        n = detail::exact_div(n, g);
        d = detail::exact_div(d, g);
        f.num = em.backward(n.times_mono(ns));
        f.den = em.backward(d);
      }
    }
    if (f.den.is_constant()) {
      f.num = f.num.scaled(1 / f.den.constant_value());
      f.den = Poly(mpq_class(1));
      return f;
    }
    mpq_class lc = canon_lead(f.den);
    if (lc != 1) {
      f.num = f.num.scaled(1 / lc);
      f.den = f.den.scaled(1 / lc);
    }
    return f;
  }

  static RF constant(const mpq_class& c) { return RF{Poly(c), Poly(mpq_class(1))}; }
  static RF atom_rf(Var v, const Rat& e = Rat(1)) { return RF{Poly::var(v, e), Poly(mpq_class(1))}; }

  RF add(const RF& a, const RF& b) {
    if (a.num.is_zero()) return b;
    if (b.num.is_zero()) return a;
    if (a.den == b.den) {
      if (a.den.is_constant()) return RF{a.num + b.num, a.den};
      return canonicalize(RF{a.num + b.num, a.den}, true);
    }
    return canonicalize(RF{a.num * b.den + b.num * a.den, a.den * b.den});
  }

  RF mul(const RF& a, const RF& b) {
    if (a.num.is_zero() || b.num.is_zero()) return RF{};
    if (a.den.is_constant() && b.den.is_constant()) return RF{reduce(a.num * b.num), Poly(mpq_class(1))};
    return canonicalize(RF{a.num * b.num, a.den * b.den});
  }

  RF inv(const RF& a) {
    if (a.num.is_zero()) throw StructuralError("division by zero");
    return canonicalize(RF{a.den, a.num}, true);
  }

  RF pow_int(const RF& a, long k) {
    if (k == 0) return constant(1);
    if (std::labs(k) > 100000) throw StructuralError("exponent too large");
    RF base = k < 0 ? inv(a) : a;
    unsigned long n = static_cast<unsigned long>(std::labs(k));
    if (base.den.is_constant() && base.num.is_monomial()) return monomial_pow(base, n);
    RF result = constant(1);
    while (n > 0) {
      if (n & 1UL) result = mul(result, base);
      n >>= 1UL;
      if (n > 0) base = mul(base, base);
    }
    return result;
  }

  RF monomial_pow(const RF& base, unsigned long n) {
    mpq_class c = base.num.lead_coeff();
    mpq_class cn;
    mpz_pow_ui(cn.get_num_mpz_t(), c.get_num_mpz_t(), n);
    mpz_pow_ui(cn.get_den_mpz_t(), c.get_den_mpz_t(), n);
    cn.canonicalize();
    RF out{Poly::monomial(detail::mono_pow(base.num.lead_mono(), Rat(static_cast<std::int64_t>(n))), cn),
           Poly(mpq_class(1))};
    out.num = reduce(out.num);
    return out;
  }

  bool is_free(Var v) const { return !atoms_[v].generator; }

  // sqrt of a polynomial as a fraction over radicals.
  RF poly_sqrt(const Poly& p) {
    if (p.is_zero()) return RF{};
    mpq_class c = detail::rational_content(p);
    Poly q = p.scaled(1 / c);
    mpz_class t = c.get_num() * c.get_den();
    mpz_class f = 1;
    mpz_class s = t < 0 ? mpz_class(-t) : t;
    for (unsigned long pr = 2; pr < 20000 && pr * pr <= s; ++pr) {
      mpz_class sq = pr * pr;
      while (mpz_divisible_p(s.get_mpz_t(), sq.get_mpz_t())) {
        s /= sq;
        f *= pr;
      }
    }
    if (mpz_perfect_square_p(s.get_mpz_t()) && s > 1) {
      mpz_class r;
      mpz_sqrt(r.get_mpz_t(), s.get_mpz_t());
      f *= r;
      s = 1;
    }
    if (t < 0) s = -s;
    mpq_class scale(f, c.get_den());
    scale.canonicalize();
    RF result = constant(scale);
    Poly key = q.scaled(mpq_class(s));
    if (s > 0) {
      std::set<Var> free;
      for (Var v : q.vars())
        if (is_free(v)) free.insert(v);
      Mono m = detail::min_mono(q, free);
      if (!m.empty()) {
        key = key.times_mono(detail::mono_pow(m, Rat(-1)));
        result.num = result.num.times_mono(detail::mono_pow(m, Rat(1, 2)));
      }
    }
    if (key.is_constant() && key.constant_value() == 1) return result;
    Var r = intern(AtomKind::Root, poly_expr(key), Expr(0), false, &key);
    return mul(result, atom_rf(r));
  }

  RF root(const RF& b, std::int64_t q) {
    if (b.num.is_zero()) return RF{};
    if (q == 2) return mul(poly_sqrt(b.num), inv(poly_sqrt(b.den)));
    auto monomial_root = [&](const Poly& p, Poly& out) {
      if (!p.is_monomial()) return false;
      const mpq_class& c = p.lead_coeff();
      mpz_class rn, rd;
      if (c < 0 || mpz_root(rn.get_mpz_t(), c.get_num_mpz_t(), q) == 0 ||
          mpz_root(rd.get_mpz_t(), c.get_den_mpz_t(), q) == 0)
        return false;
      for (const auto& [v, e] : p.lead_mono())
        if (!is_free(v)) return false;
      out = Poly::monomial(detail::mono_pow(p.lead_mono(), Rat(1, q)), mpq_class(rn, rd));
      return true;
    };
    Poly rn, rd;
    if (monomial_root(b.num, rn) && monomial_root(b.den, rd)) return canonicalize(RF{rn, rd});
    Var v = intern(AtomKind::Pow, to_expr(b), Expr(mpq_class(1, q)));
    return atom_rf(v);
  }

  RF power_rf(const Expr& base, const Expr& exponent) {
    RF e = to_rf(exponent);
    if (e.den.is_constant() && e.num.is_constant()) {
      mpq_class q = e.num.constant_value();
      if (q == 0) return constant(1);
      if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p())
        throw StructuralError("exponent out of range");
      long p = q.get_num().get_si();
      long d = q.get_den().get_si();
      RF b = to_rf(base);
      if (b.num.is_zero()) {
        if (q < 0) throw StructuralError("division by zero");
        return RF{};
      }
      if (d == 1) return pow_int(b, p);
      return pow_int(root(b, d), p);
    }
    if (base.is_function(FunctionKind::Exp)) return exp_rf(mul(to_rf(base.argument()), e));
    RF b = to_rf(base);
    if (b.num.is_constant() && b.den.is_constant() && b.num.constant_value() == 1) return constant(1);
    Var v = intern(AtomKind::Pow, to_expr(b), to_expr(e));
    return atom_rf(v);
  }

  RF exp_rf(const RF& u) {
    if (u.num.is_zero()) return constant(1);
    if (u.den.is_constant()) {
      mpq_class dc = u.den.constant_value();
      Mono out;
      for (const auto& [m, c] : u.num.terms()) {
        mpq_class cc = c / dc;
        Rat r;
        Var v;
        if (Rat::from_mpq(cc, r)) {
          Expr key = m.empty() ? Expr(1) : to_expr(RF{Poly::monomial(m, 1), Poly(mpq_class(1))});
          v = intern(AtomKind::Exp, key);
        } else {
          v = intern(AtomKind::Exp, to_expr(RF{Poly::monomial(m, cc), Poly(mpq_class(1))}));
          r = Rat(1);
        }
        out = detail::mono_mul(out, Mono{{v, r}});
      }
      return RF{Poly::monomial(out, 1), Poly(mpq_class(1))};
    }
    mpq_class lc = canon_lead(u.num);
    Rat r;
    Var v;
    if (Rat::from_mpq(lc, r)) {
      v = intern(AtomKind::Exp, to_expr(RF{u.num.scaled(1 / lc), u.den}), Expr(0), true);
    } else {
      v = intern(AtomKind::Exp, to_expr(u), Expr(0), true);
      r = Rat(1);
    }
    return atom_rf(v, r);
  }

  RF function_rf(FunctionKind kind, const Expr& arg) {
    RF u = to_rf(arg);
    if (kind == FunctionKind::Exp) return exp_rf(u);
    if (u.num.is_zero()) {
      return (kind == FunctionKind::Cos || kind == FunctionKind::Cosh) ? constant(1) : RF{};
    }
    bool negate = canon_lead(u.num) < 0;
    if (negate) u.num = -u.num;
    Expr key = to_expr(u);
    AtomKind ak = AtomKind::Sin;
    bool odd = false;
    switch (kind) {
      case FunctionKind::Sin:
        ak = AtomKind::Sin;
        odd = true;
        break;
      case FunctionKind::Cos:
        ak = AtomKind::Cos;
        break;
      case FunctionKind::Sinh:
        ak = AtomKind::Sinh;
        odd = true;
        break;
      case FunctionKind::Cosh:
        ak = AtomKind::Cosh;
        break;
      case FunctionKind::Exp:
        break;
    }
    RF out = atom_rf(intern(ak, key));
    if (odd && negate) out.num = -out.num;
    return out;
  }

  RF integral_rf(const Expr& e) {
    RF f = to_rf(e.integrand());
    if (f.num.is_zero()) return RF{};
    mpq_class lc = canon_lead(f.num);
    Expr key = to_expr(RF{f.num.scaled(1 / lc), f.den});
    Var v = intern(AtomKind::Integral, key, Expr::variable(e.name()));
    RF out = atom_rf(v);
    out.num = out.num.scaled(lc);
    return out;
  }

  Expr atom_power(Var v, const Rat& e) {
    const Atom& a = atoms_[v];
    Expr base;
    Expr ex(e.to_mpq());
    switch (a.kind) {
      case AtomKind::Variable:
      case AtomKind::Parameter:
        base = a.key;
        break;
      case AtomKind::Sin:
        base = Expr::make_function(FunctionKind::Sin, a.key);
        break;
      case AtomKind::Cos:
        base = Expr::make_function(FunctionKind::Cos, a.key);
        break;
      case AtomKind::Sinh:
        base = Expr::make_function(FunctionKind::Sinh, a.key);
        break;
      case AtomKind::Cosh:
        base = Expr::make_function(FunctionKind::Cosh, a.key);
        break;
      case AtomKind::Root:
        return Expr::make_power(a.key, Expr(e.to_mpq() / 2));
      case AtomKind::Pow:
        base = Expr::make_power(a.key, a.key2);
        break;
      case AtomKind::Integral:
        base = Expr::make_integral(a.key, a.key2.name());
        break;
      case AtomKind::Exp: {
        Expr arg = e == Rat(1) ? a.key : product({ex, a.key});
        return Expr::make_function(FunctionKind::Exp, arg);
      }
    }
    if (e == Rat(1)) return base;
    return Expr::make_power(base, ex);
  }

  Expr term_expr(const Mono& m, const mpq_class& c) {
    std::vector<std::pair<std::uint32_t, std::pair<Var, Rat>>> order;
    for (const auto& [v, e] : m) order.push_back({rank_[v], {v, e}});
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Expr> factors;
    std::vector<Expr> exp_terms;
    std::size_t exp_slot = 0;
    bool has_exp = false;
    for (const auto& [rk, ve] : order) {
      const auto& [v, e] = ve;
      const Atom& a = atoms_[v];
      if (a.kind == AtomKind::Exp && !a.opaque) {
        if (!has_exp) {
          exp_slot = factors.size();
          has_exp = true;
        }
        exp_terms.push_back(e == Rat(1) ? a.key : product({Expr(e.to_mpq()), a.key}));
        continue;
      }
      factors.push_back(atom_power(v, e));
    }
    if (has_exp) {
      Expr arg = exp_terms.size() == 1 ? exp_terms[0] : Expr::make_sum(exp_terms);
      factors.insert(factors.begin() + static_cast<std::ptrdiff_t>(exp_slot),
                     Expr::make_function(FunctionKind::Exp, arg));
    }
    if (c != 1) factors.insert(factors.begin(), Expr(c));
    if (factors.empty()) return Expr(c);
    if (factors.size() == 1) return factors[0];
    return Expr::make_product(std::move(factors));
  }

  std::vector<std::pair<const Mono*, const mpq_class*>> ordered_terms(const Poly& p) const {
    std::vector<std::pair<CanonMono, std::pair<const Mono*, const mpq_class*>>> items;
    for (const auto& [m, c] : p.terms()) items.push_back({canon(m), {&m, &c}});
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return canon_cmp(a.first, b.first) > 0; });
    std::vector<std::pair<const Mono*, const mpq_class*>> out;
    for (auto& it : items) out.push_back(it.second);
    return out;
  }

  Expr sum_expr(const Poly& p, const Mono& divide_by) {
    std::vector<Expr> terms;
    for (const auto& [m, c] : ordered_terms(p)) terms.push_back(term_expr(detail::mono_div(*m, divide_by), *c));
    if (terms.empty()) return Expr(0);
    if (terms.size() == 1) return terms[0];
    return Expr::make_sum(std::move(terms));
  }
};

Engine& engine() {
  static Engine e;
  return e;
}

RF Engine::to_rf(const Expr& e) {
  auto it = rf_cache_.find(e);
  if (it != rf_cache_.end()) return it->second;
  RF out;
  switch (e.kind()) {
    case NodeKind::Integer:
    case NodeKind::Rational:
      out = constant(e.number_value());
      break;
    case NodeKind::Variable:
      out = atom_rf(intern(AtomKind::Variable, e));
      break;
    case NodeKind::Parameter:
      out = atom_rf(intern(AtomKind::Parameter, e));
      break;
    case NodeKind::Sum: {
      RF acc;
      for (const auto& t : e.operands()) acc = add(acc, to_rf(t));
      out = std::move(acc);
      break;
    }
    case NodeKind::Product: {
      RF acc = constant(1);
      for (const auto& f : e.operands()) {
        acc = mul(acc, to_rf(f));
        if (acc.num.is_zero()) break;
      }
      out = std::move(acc);
      break;
    }
    case NodeKind::Power:
      out = power_rf(e.base(), e.exponent());
      break;
    case NodeKind::SquareRoot:
      out = power_rf(e.argument(), Expr::rational(1, 2));
      break;
    case NodeKind::Function:
      out = function_rf(e.function_kind(), e.argument());
      break;
    case NodeKind::Integral:
      out = integral_rf(e);
      break;
  }
  if (rf_cache_.size() > 400000) rf_cache_.clear();
  rf_cache_.emplace(e, out);
  return out;
}

Expr Engine::to_expr(const RF& f) {
  if (f.num.is_zero()) return Expr(0);
  if (f.den.is_constant()) {
    if (f.den.constant_value() == 1) return sum_expr(f.num, Mono{});
    return sum_expr(f.num.scaled(1 / f.den.constant_value()), Mono{});
  }
  if (f.den.is_monomial() && f.den.lead_coeff() == 1) return sum_expr(f.num, f.den.lead_mono());
  Expr n = sum_expr(f.num, Mono{});
  Expr d = sum_expr(f.den, Mono{});
  std::vector<Expr> factors;
  if (n.is(NodeKind::Product)) {
    for (const auto& op : n.operands()) factors.push_back(op);
  } else if (!n.is_one()) {
    factors.push_back(n);
  }
  factors.push_back(Expr::make_power(d, Expr(-1)));
  if (factors.size() == 1) return factors[0];
  return Expr::make_product(std::move(factors));
}

Expr substitute_rec(const Expr& e, const Substitution& b, std::unordered_map<const void*, Expr>& memo) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  Expr out = e;
  switch (e.kind()) {
    case NodeKind::Integer:
    case NodeKind::Rational:
      break;
    case NodeKind::Variable:
    case NodeKind::Parameter: {
      auto f = b.find(e.name());
      if (f != b.end()) out = f->second;
      break;
    }
    case NodeKind::Sum: {
      std::vector<Expr> t;
      for (const auto& op : e.operands()) t.push_back(substitute_rec(op, b, memo));
      out = sum(std::move(t));
      break;
    }
    case NodeKind::Product: {
      std::vector<Expr> t;
      for (const auto& op : e.operands()) t.push_back(substitute_rec(op, b, memo));
      out = product(std::move(t));
      break;
    }
    case NodeKind::Power:
      out = pow(substitute_rec(e.base(), b, memo), substitute_rec(e.exponent(), b, memo));
      break;
    case NodeKind::SquareRoot:
      out = sqrt(substitute_rec(e.argument(), b, memo));
      break;
    case NodeKind::Function:
      out = Expr::make_function(e.function_kind(), substitute_rec(e.argument(), b, memo));
      break;
    case NodeKind::Integral:
      if (b.count(e.name()) && e.integrand().depends_on(e.name()))
        throw StructuralError("cannot substitute the integration variable of an unevaluated integral");
      out = integral(substitute_rec(e.integrand(), b, memo), e.name());
      break;
  }
  memo.emplace(e.id(), out);
  return out;
}

void collect_denominators(const Expr& e, std::vector<Expr>& out, std::unordered_map<const void*, bool>& seen) {
  if (!seen.emplace(e.id(), true).second) return;
  if (e.is(NodeKind::Power) && e.exponent().is_number() && e.exponent().number_value() < 0) {
    if (std::find(out.begin(), out.end(), e.base()) == out.end()) out.push_back(e.base());
  }
  for (const auto& op : e.operands()) collect_denominators(op, out, seen);
}

}  // namespace

Expr normalize(const Expr& e) {
  Engine& eng = engine();
  std::lock_guard lock(eng.mu);
  return eng.normalize(e);
}

bool is_zero(const Expr& e) { return normalize(e).is_zero(); }

bool equivalent(const Expr& a, const Expr& b) { return normalize(a) == normalize(b) || is_zero(a - b); }

Expr substitute_raw(const Expr& e, const Substitution& bindings) {
  std::unordered_map<const void*, Expr> memo;
  return substitute_rec(e, bindings, memo);
}

Expr substitute(const Expr& e, const Substitution& bindings) { return normalize(substitute_raw(e, bindings)); }

std::pair<Expr, Expr> as_fraction(const Expr& e) {
  Engine& eng = engine();
  std::lock_guard lock(eng.mu);
  return eng.fraction(e);
}

std::vector<Expr> denominators(const Expr& e) {
  std::vector<Expr> out;
  std::unordered_map<const void*, bool> seen;
  collect_denominators(e, out, seen);
  return out;
}

void clear_normalize_cache() {
  Engine& eng = engine();
  std::lock_guard lock(eng.mu);
  eng.clear();
}

}  // namespace eidforge
