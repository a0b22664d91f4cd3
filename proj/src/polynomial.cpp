#include "iolb/polynomial.hpp"

#include <stdexcept>

namespace iolb {

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

bool monomial_less(const Monomial& a, const Monomial& b) {
  int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      if (a[i].second != b[j].second) return a[i].second < b[j].second;
      ++i;
      ++j;
    } else {
      return a[i].first > b[j].first;
    }
  }
  return i == a.size() && j < b.size();
}

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t j = 0;
  for (const auto& [v, e] : a) {
    int sub = 0;
    if (j < b.size() && b[j].first == v) sub = b[j++].second;
    if (j < b.size() && b[j].first < v) return std::nullopt;
    if (sub > e) return std::nullopt;
    if (e - sub > 0) out.emplace_back(v, e - sub);
  }
  if (j != b.size()) return std::nullopt;
  return out;
}

int exponent_of(const Monomial& m, const std::string& var) {
  for (const auto& [v, e] : m)
    if (v == var) return e;
  return 0;
}

Monomial without(const Monomial& m, const std::string& var) {
  Monomial out;
  for (const auto& t : m)
    if (t.first != var) out.push_back(t);
  return out;
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::variable(const std::string& name, int exponent) {
  if (exponent == 0) return Poly(1);
  return term(Monomial{{name, exponent}}, 1);
}

Poly Poly::term(const Monomial& m, const Rational& c) {
  Poly p;
  p.add_term(m, c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::set<std::string> Poly::variables() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) out.insert(v);
  return out;
}

int Poly::degree_in(const std::string& var) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, exponent_of(m, var));
  return d;
}

int Poly::total_degree() const { return terms_.empty() ? 0 : degree(terms_.rbegin()->first); }

const Monomial& Poly::leading_monomial() const {
  if (terms_.empty()) throw std::domain_error("leading monomial of the zero polynomial");
  return terms_.rbegin()->first;
}

const Rational& Poly::leading_coefficient() const {
  if (terms_.empty()) throw std::domain_error("leading coefficient of the zero polynomial");
  return terms_.rbegin()->second;
}

Rational Poly::evaluate(const Valuation& v) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [var, e] : m) {
      auto it = v.find(var);
      if (it == v.end()) throw std::out_of_range("unbound symbol '" + var + "'");
      t *= pow_int(it->second, e);
    }
    total += t;
  }
  return total;
}

Poly Poly::substitute(const std::string& var, const Poly& value) const {
  Poly out;
  std::map<int, Poly> powers;
  for (const auto& [m, c] : terms_) {
    int e = exponent_of(m, var);
    if (e == 0) {
      out.add_term(m, c);
      continue;
    }
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, value.pow(static_cast<unsigned>(e))).first;
    out += term(without(m, var), c) * it->second;
  }
  return out;
}

std::map<int, Poly> Poly::coefficients_in(const std::string& var) const {
  std::map<int, Poly> out;
  for (const auto& [m, c] : terms_) out[exponent_of(m, var)].add_term(without(m, var), c);
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  return out;
}

Poly Poly::pow(unsigned e) const {
  Poly result(1), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational mag = c < 0 ? Rational(-c) : c;
    if (s.empty())
      s += c < 0 ? "-" : "";
    else
      s += c < 0 ? " - " : " + ";
    std::string mono;
    for (const auto& [v, e] : m) {
      if (!mono.empty()) mono += "*";
      mono += v;
      if (e != 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty())
      s += iolb::to_string(mag);
    else if (mag == 1)
      s += mono;
    else
      s += iolb::to_string(mag) + "*" + mono;
  }
  return s;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  Poly q, r = a;
  const Monomial& lb = b.leading_monomial();
  const Rational& cb = b.leading_coefficient();
  while (!r.is_zero()) {
    auto m = divide(r.leading_monomial(), lb);
    if (!m) return std::nullopt;
    Poly t = Poly::term(*m, r.leading_coefficient() / cb);
    q += t;
    r -= t * b;
  }
  return q;
}

namespace {

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  Rational lc = p.leading_coefficient();
  return p * Poly(Rational(1) / lc);
}

Poly leading_in(const Poly& p, const std::string& x) {
  auto coeffs = p.coefficients_in(x);
  return coeffs.rbegin()->second;
}

Poly pseudo_remainder(const Poly& a, const Poly& b, const std::string& x) {
  int db = b.degree_in(x);
  Poly lb = leading_in(b, x);
  Poly r = a;
  while (!r.is_zero()) {
    int dr = r.degree_in(x);
    if (dr < db) break;
    Poly lr = leading_in(r, x);
    r = lb * r - lr * Poly::variable(x, dr - db) * b;
  }
  return r;
}

Poly content_in(const Poly& p, const std::string& x) {
  Poly c;
  for (const auto& [e, coeff] : p.coefficients_in(x)) {
    c = gcd(c, coeff);
    if (c.is_constant() && !c.is_zero()) return Poly(1);
  }
  return c;
}

Poly primitive_in(const Poly& p, const std::string& x) {
  if (p.is_zero()) return p;
  return *divide_exact(p, content_in(p, x));
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant()) return Poly(1);
  std::set<std::string> vars = a.variables();
  for (const auto& v : b.variables()) vars.insert(v);
  const std::string x = *vars.begin();
  if (a.degree_in(x) == 0) return gcd(a, content_in(b, x));
  if (b.degree_in(x) == 0) return gcd(content_in(a, x), b);
  Poly c = gcd(content_in(a, x), content_in(b, x));
  Poly pa = primitive_in(a, x), pb = primitive_in(b, x);
  if (pa.degree_in(x) < pb.degree_in(x)) std::swap(pa, pb);
  Poly g;
  while (true) {
    Poly r = pseudo_remainder(pa, pb, x);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (r.degree_in(x) == 0) {
      g = Poly(1);
      break;
    }
    pa = pb;
    pb = primitive_in(r, x);
  }
  return monic(c * primitive_in(g, x));
}

namespace {

// Coefficients of F_e(n) = sum_{v=0}^{n-1} v^e as a polynomial in n.
std::vector<Rational> power_sum(int e) {
  static std::vector<std::vector<Rational>> cache;
  while (static_cast<int>(cache.size()) <= e) {
    int k = static_cast<int>(cache.size());
    std::vector<Rational> f(static_cast<std::size_t>(k) + 2, Rational(0));
    f[static_cast<std::size_t>(k) + 1] = 1;
    BigInt binom = 1;  // C(k+1, m)
    for (int m = 0; m < k; ++m) {
      for (std::size_t t = 0; t < cache[static_cast<std::size_t>(m)].size(); ++t)
        f[t] -= Rational(binom) * cache[static_cast<std::size_t>(m)][t];
      binom = binom * (k + 1 - m) / (m + 1);
    }
    for (auto& c : f) c /= (k + 1);
    cache.push_back(std::move(f));
  }
  return cache[static_cast<std::size_t>(e)];
}

Poly eval_power_sum(int e, const Poly& n) {
  auto f = power_sum(e);
  Poly out;
  Poly np(1);
  for (const auto& c : f) {
    out += np * Poly(c);
    np = np * n;
  }
  return out;
}

}  // namespace

Poly sum_over(const Poly& p, const std::string& var, const Poly& lower, const Poly& upper) {
  Poly out;
  for (const auto& [e, coeff] : p.coefficients_in(var))
    out += coeff * (eval_power_sum(e, upper) - eval_power_sum(e, lower));
  return out;
}

RationalFunction::RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

void RationalFunction::normalize() {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (!den_.is_constant()) {
    Poly g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = *divide_exact(num_, g);
      den_ = *divide_exact(den_, g);
    }
  }
  Rational lc = den_.leading_coefficient();
  if (lc != 1) {
    Poly inv(Rational(1) / lc);
    num_ = num_ * inv;
    den_ = den_ * inv;
  }
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out = *this;
  out.num_ = -out.num_;
  return out;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.num_.is_zero()) throw std::domain_error("division by a zero rational function");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::pow(long e) const {
  if (e < 0) return RationalFunction(Poly(1)) / pow(-e);
  return RationalFunction(num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)));
}

RationalFunction RationalFunction::substitute(const std::string& var, const RationalFunction& value) const {
  auto apply = [&](const Poly& p) {
    RationalFunction out;
    for (const auto& [e, coeff] : p.coefficients_in(var)) out = out + RationalFunction(coeff) * value.pow(e);
    return out;
  };
  return apply(num_) / apply(den_);
}

Rational RationalFunction::evaluate(const Valuation& v) const {
  Rational d = den_.evaluate(v);
  if (d == 0) throw std::domain_error("denominator " + den_.to_string() + " vanishes");
  return num_.evaluate(v) / d;
}

std::string RationalFunction::to_string() const {
  if (den_ == Poly(1)) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

}  // namespace iolb
