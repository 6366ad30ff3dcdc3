#include "poly.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace eidforge::detail {

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("exponent overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rat::Rat(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("zero exponent denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

mpq_class Rat::to_mpq() const {
  return mpq_class(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
}

bool Rat::from_mpq(const mpq_class& q, Rat& out) {
  if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) return false;
  out = Rat(q.get_num().get_si(), q.get_den().get_si());
  return true;
}

Rat operator+(const Rat& a, const Rat& b) {
  __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
  __int128 d = static_cast<__int128>(a.den) * b.den;
  __int128 g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return Rat(checked(n / g), checked(d / g));
}

Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }

Rat operator*(const Rat& a, const Rat& b) {
  __int128 n = static_cast<__int128>(a.num) * b.num;
  __int128 d = static_cast<__int128>(a.den) * b.den;
  __int128 g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return Rat(checked(n / g), checked(d / g));
}

int cmp(const Rat& a, const Rat& b) {
  __int128 l = static_cast<__int128>(a.num) * b.den;
  __int128 r = static_cast<__int128>(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      Rat e = a[i].second + b[j].second;
      if (!e.is_zero()) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

Mono mono_pow(const Mono& a, const Rat& k) {
  Mono out;
  if (k.is_zero()) return out;
  out.reserve(a.size());
  for (const auto& [v, e] : a) out.emplace_back(v, e * k);
  return out;
}

Mono mono_div(const Mono& a, const Mono& b) { return mono_mul(a, mono_pow(b, Rat(-1))); }

Rat mono_exp(const Mono& m, Var v) {
  auto it = std::lower_bound(m.begin(), m.end(), v,
                             [](const std::pair<Var, Rat>& p, Var x) { return p.first < x; });
  if (it != m.end() && it->first == v) return it->second;
  return Rat(0);
}

Mono mono_without(const Mono& m, Var v) {
  Mono out;
  out.reserve(m.size());
  for (const auto& p : m)
    if (p.first != v) out.push_back(p);
  return out;
}

bool mono_divides(const Mono& a, const Mono& b) {
  Mono q = mono_div(b, a);
  return std::all_of(q.begin(), q.end(), [](const auto& p) { return p.second.num > 0; });
}

int mono_cmp(const Mono& a, const Mono& b) {
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(a.size()) - 1;
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(b.size()) - 1;
  while (i >= 0 || j >= 0) {
    if (j < 0 || (i >= 0 && a[i].first > b[j].first)) {
      return a[i].second.num > 0 ? 1 : -1;
    }
    if (i < 0 || b[j].first > a[i].first) {
      return b[j].second.num > 0 ? -1 : 1;
    }
    int c = cmp(a[i].second, b[j].second);
    if (c != 0) return c;
    --i;
    --j;
  }
  return 0;
}

Poly::Poly(const mpq_class& c) {
  if (sgn(c) != 0) terms_.emplace(Mono{}, c);
}

Poly Poly::var(Var v, const Rat& e) {
  Poly p;
  if (e.is_zero())
    p.terms_.emplace(Mono{}, mpq_class(1));
  else
    p.terms_.emplace(Mono{{v, e}}, mpq_class(1));
  return p;
}

Poly Poly::monomial(const Mono& m, const mpq_class& c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.emplace(m, c);
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

mpq_class Poly::constant_value() const {
  if (terms_.empty()) return 0;
  auto it = terms_.find(Mono{});
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void Poly::add_term(const Mono& m, const mpq_class& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::set<Var> Poly::vars() const {
  std::set<Var> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) out.insert(v);
  return out;
}

bool Poly::has_var(Var v) const {
  for (const auto& [m, c] : terms_)
    if (!mono_exp(m, v).is_zero()) return true;
  return false;
}

Rat Poly::degree(Var v) const {
  Rat best(0);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat e = mono_exp(m, v);
    if (first || best < e) best = e;
    first = false;
  }
  return best;
}

Rat Poly::min_degree(Var v) const {
  Rat best(0);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat e = mono_exp(m, v);
    if (first || e < best) best = e;
    first = false;
  }
  return best;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  if (is_zero() || o.is_zero()) return r;
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) r.add_term(mono_mul(m1, m2), c1 * c2);
  return r;
}

Poly Poly::scaled(const mpq_class& c) const {
  Poly r;
  if (sgn(c) == 0) return r;
  r = *this;
  for (auto& [m, v] : r.terms_) v *= c;
  return r;
}

Poly Poly::times_mono(const Mono& mono) const {
  if (mono.empty()) return *this;
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), mono_mul(m, mono), c);
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly result(mpq_class(1));
  Poly base = *this;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  for (; i != a.terms_.end(); ++i, ++j)
    if (i->first != j->first || i->second != j->second) return false;
  return true;
}

std::size_t Poly::hash() const {
  std::size_t h = terms_.size();
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m) h = h * 1000003U ^ (v * 31U + static_cast<std::size_t>(e.num) * 7U + e.den);
    h = h * 1000003U ^ static_cast<std::size_t>(mpz_get_si(c.get_num_mpz_t()));
  }
  return h;
}

std::map<std::int64_t, Poly> split_by(const Poly& p, Var v) {
  std::map<std::int64_t, Poly> out;
  for (const auto& [m, c] : p.terms()) {
    Rat e = mono_exp(m, v);
    out[e.num].add_term(mono_without(m, v), c);
  }
  return out;
}

void ExponentMap::include(const Poly& p) {
  for (const auto& [m, c] : p.terms())
    for (const auto& [v, e] : m) {
      auto& s = scale[v];
      if (s == 0) s = 1;
      s = std::lcm(s, e.den);
    }
}

Poly ExponentMap::forward(const Poly& p) const {
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    Mono n = m;
    for (auto& [v, e] : n) {
      auto it = scale.find(v);
      if (it != scale.end()) e = e * Rat(it->second);
    }
    r.add_term(n, c);
  }
  return r;
}

Poly ExponentMap::backward(const Poly& p) const {
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    Mono n = m;
    for (auto& [v, e] : n) {
      auto it = scale.find(v);
      if (it != scale.end()) e = e * Rat(1, it->second);
    }
    r.add_term(n, c);
  }
  return r;
}

Mono min_mono(const Poly& p, const std::set<Var>& which) {
  Mono out;
  for (Var v : which) {
    if (!p.has_var(v)) continue;
    Rat e = p.min_degree(v);
    if (!e.is_zero()) out.emplace_back(v, e);
  }
  return out;
}

mpq_class rational_content(const Poly& p) {
  if (p.is_zero()) return 1;
  mpz_class g = 0, l = 1;
  for (const auto& [m, c] : p.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  mpq_class r(g, l);
  r.canonicalize();
  if (sgn(p.lead_coeff()) < 0) r = -r;
  return r;
}

Poly primitive_z(const Poly& p) {
  if (p.is_zero()) return p;
  mpq_class c = rational_content(p);
  return p.scaled(1 / c);
}

Poly exact_div(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::logic_error("division by zero polynomial");
  if (b.is_constant()) return a.scaled(1 / b.constant_value());
  Poly q;
  Poly r = a;
  const Mono& lb = b.lead_mono();
  const mpq_class& cb = b.lead_coeff();
  while (!r.is_zero()) {
    const Mono& lr = r.lead_mono();
    Mono qm = mono_div(lr, lb);
    for (const auto& [v, e] : qm)
      if (e.num < 0) throw std::logic_error("inexact polynomial division");
    mpq_class qc = r.lead_coeff() / cb;
    q.add_term(qm, qc);
    r = r - b.times_mono(qm).scaled(qc);
  }
  return q;
}

namespace {

// The shared variable of lowest degree keeps pseudo-remainder sequences short.
Var main_var(const Poly& a, const Poly& b) {
  Var best = 0;
  std::int64_t best_deg = -1;
  for (Var v : a.vars()) {
    if (!b.has_var(v)) continue;
    std::int64_t d = std::max(a.degree(v).num, b.degree(v).num);
    if (best_deg < 0 || d < best_deg) {
      best = v;
      best_deg = d;
    }
  }
  return best;
}

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1U) r = mulmod(r, b);
    b = mulmod(b, b);
    e >>= 1U;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

bool coeff_mod(const mpq_class& c, std::uint64_t& out) {
  std::uint64_t n = mpz_fdiv_ui(c.get_num_mpz_t(), kPrime);
  std::uint64_t d = mpz_fdiv_ui(c.get_den_mpz_t(), kPrime);
  if (d == 0) return false;
  out = mulmod(n, invmod(d));
  return true;
}

// Image of p in GF(q)[v] with every other variable replaced by a fixed
// pseudo-random value; empty when the degree in v drops.
bool univariate_image(const Poly& p, Var v, std::vector<std::uint64_t>& out) {
  std::int64_t deg = p.degree(v).num;
  out.assign(static_cast<std::size_t>(deg + 1), 0);
  for (const auto& [m, c] : p.terms()) {
    std::uint64_t t = 0;
    if (!coeff_mod(c, t)) return false;
    std::int64_t k = 0;
    for (const auto& [w, e] : m) {
      if (!e.is_integer() || e.num < 0) return false;
      if (w == v) {
        k = e.num;
        continue;
      }
      std::uint64_t val = (0x9E3779B97F4A7C15ULL * (w + 1)) % kPrime;
      t = mulmod(t, powmod(val, static_cast<std::uint64_t>(e.num)));
    }
    auto& slot = out[static_cast<std::size_t>(k)];
    slot = (slot + t) % kPrime;
  }
  return out.back() != 0;
}

std::size_t gf_gcd_degree(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  auto trim = [](std::vector<std::uint64_t>& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
  };
  trim(a);
  trim(b);
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    std::uint64_t inv = invmod(b.back());
    while (a.size() >= b.size() && !a.empty()) {
      std::uint64_t f = mulmod(a.back(), inv);
      std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        a[i + shift] = (a[i + shift] + kPrime - mulmod(f, b[i])) % kPrime;
      trim(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

// True only when a and b are certainly coprime: a common factor would
// survive as a common root of the images in every shared variable.
bool surely_coprime(const Poly& a, const Poly& b) {
  for (Var v : a.vars()) {
    if (!b.has_var(v)) continue;
    std::vector<std::uint64_t> ia, ib;
    if (!univariate_image(a, v, ia) || !univariate_image(b, v, ib)) return false;
    if (gf_gcd_degree(ia, ib) > 0) return false;
  }
  return true;
}

Poly mono_gcd_with(const Mono& m, const Poly& p) {
  Mono g = m;
  for (const auto& [pm, c] : p.terms()) {
    Mono next;
    for (const auto& [v, e] : g) {
      Rat f = mono_exp(pm, v);
      Rat mn = f < e ? f : e;
      if (mn.num > 0) next.emplace_back(v, mn);
    }
    g = std::move(next);
    if (g.empty()) break;
  }
  return Poly::monomial(g, 1);
}

Poly lead_in(const Poly& p, Var v, std::int64_t& deg) {
  deg = p.degree(v).num;
  Poly out;
  for (const auto& [m, c] : p.terms())
    if (mono_exp(m, v).num == deg) out.add_term(mono_without(m, v), c);
  return out;
}

Poly content_in(const Poly& p, Var v);

Poly gcd_rec(const Poly& a, const Poly& b);

Poly pseudo_rem(Poly a, const Poly& b, Var v) {
  std::int64_t db = 0;
  Poly lb = lead_in(b, v, db);
  while (!a.is_zero()) {
    std::int64_t da = 0;
    Poly la = lead_in(a, v, da);
    if (da < db) break;
    Mono shift;
    if (da > db) shift.emplace_back(v, Rat(da - db));
    a = a * lb - (b * la).times_mono(shift);
    a = primitive_z(a);
  }
  return a;
}

Poly primitive_in(const Poly& p, Var v) {
  Poly c = content_in(p, v);
  if (c.is_constant()) return primitive_z(p);
  return primitive_z(exact_div(p, c));
}

Poly content_in(const Poly& p, Var v) {
  auto parts = split_by(p, v);
  Poly g;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    g = g.is_zero() ? primitive_z(it->second) : gcd_rec(g, it->second);
    if (g.is_constant()) return Poly(mpq_class(1));
  }
  return g;
}

Poly gcd_rec(const Poly& a, const Poly& b) {
  if (a.is_zero()) return primitive_z(b);
  if (b.is_zero()) return primitive_z(a);
  if (a.is_constant() || b.is_constant()) return Poly(mpq_class(1));
  if (a.is_monomial()) return mono_gcd_with(a.lead_mono(), b);
  if (b.is_monomial()) return mono_gcd_with(b.lead_mono(), a);
  if (a == b) return primitive_z(a);
  for (Var w : a.vars())
    if (!b.has_var(w)) return gcd_rec(content_in(a, w), b);
  for (Var w : b.vars())
    if (!a.has_var(w)) return gcd_rec(a, content_in(b, w));
  if (surely_coprime(a, b)) return Poly(mpq_class(1));
  Var v = main_var(a, b);
  Poly ca = content_in(a, v);
  Poly cb = content_in(b, v);
  Poly c = gcd_rec(ca, cb);
  Poly pa = ca.is_constant() ? primitive_z(a) : primitive_z(exact_div(a, ca));
  Poly pb = cb.is_constant() ? primitive_z(b) : primitive_z(exact_div(b, cb));
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  while (true) {
    Poly r = pseudo_rem(pa, pb, v);
    if (r.is_zero()) break;
    if (!r.has_var(v)) {
      pb = Poly(mpq_class(1));
      break;
    }
    pa = std::move(pb);
    pb = primitive_in(r, v);
  }
  if (!pb.is_constant()) pb = primitive_in(pb, v);
  return primitive_z(pb * c);
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) { return gcd_rec(a, b); }

}  // namespace eidforge::detail
