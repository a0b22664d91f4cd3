#include "iolb/bound_expr.hpp"

#include <algorithm>

namespace iolb {

struct BoundExpr::Node {
  Kind kind;
  Rational value;
  std::string name;
  std::vector<BoundExpr> children;
  std::string key;
};

namespace {

bool needs_parens(const BoundExpr& e) {
  auto k = e.kind();
  if (k == BoundExpr::Kind::sum || k == BoundExpr::Kind::quotient || k == BoundExpr::Kind::product) return true;
  return k == BoundExpr::Kind::constant && (e.value() < 0 || !is_integer(e.value()));
}

std::string wrap(const BoundExpr& e) { return needs_parens(e) ? "(" + e.to_string() + ")" : e.to_string(); }

std::string render(BoundExpr::Kind kind, const Rational& value, const std::string& name,
                   const std::vector<BoundExpr>& ch) {
  using K = BoundExpr::Kind;
  switch (kind) {
    case K::constant:
      return iolb::to_string(value);
    case K::parameter:
      return name;
    case K::sum: {
      std::string s;
      for (const auto& c : ch) {
        std::string t = c.to_string();
        if (s.empty())
          s = t;
        else if (t.rfind('-', 0) == 0)
          s += " - " + t.substr(1);
        else
          s += " + " + t;
      }
      return s;
    }
    case K::product: {
      std::string s;
      std::size_t start = 0;
      if (!ch.empty() && ch[0].is_constant() && ch[0].value() == -1) {
        s = "-";
        start = 1;
      }
      for (std::size_t i = start; i < ch.size(); ++i) {
        if (i > start) s += "*";
        s += ch[i].kind() == K::sum ? "(" + ch[i].to_string() + ")" : ch[i].to_string();
      }
      return s;
    }
    case K::quotient:
      return wrap(ch[0]) + "/" + wrap(ch[1]);
    case K::power:
      return wrap(ch[0]) + "^" + (is_integer(value) && value >= 0 ? iolb::to_string(value)
                                                                  : "(" + iolb::to_string(value) + ")");
    case K::floor:
      return "floor(" + ch[0].to_string() + ")";
    case K::min:
    case K::max: {
      std::string s = kind == K::min ? "min(" : "max(";
      for (std::size_t i = 0; i < ch.size(); ++i) s += (i ? ", " : "") + ch[i].to_string();
      return s + ")";
    }
  }
  return {};
}

bool key_less(const BoundExpr& a, const BoundExpr& b) {
  if (a.is_constant() != b.is_constant()) return a.is_constant();
  return a.to_string() < b.to_string();
}

// Exact q-th root of a non-negative rational when it exists.
std::optional<Rational> exact_root(const Rational& r, unsigned q) {
  BigInt n = numerator_of(r), d = denominator_of(r);
  BigInt rn = integer_root(n, q), rd = integer_root(d, q);
  if (pow_int(rn, q) != n || pow_int(rd, q) != d) return std::nullopt;
  return Rational(rn) / Rational(rd);
}

std::optional<Rational> rational_power(const Rational& base, const Rational& exponent) {
  BigInt p = numerator_of(exponent), q = denominator_of(exponent);
  if (q == 1) return pow_int(base, p.convert_to<long>());
  if (base < 0) return std::nullopt;
  auto root = exact_root(base, q.convert_to<unsigned>());
  if (!root) return std::nullopt;
  if (*root == 0 && p < 0) return std::nullopt;
  return pow_int(*root, p.convert_to<long>());
}

}  // namespace

BoundExpr BoundExpr::make(Kind kind, Rational value, std::string name, std::vector<BoundExpr> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = std::move(value);
  node->name = std::move(name);
  node->children = std::move(children);
  node->key = render(node->kind, node->value, node->name, node->children);
  return BoundExpr(std::shared_ptr<const Node>(std::move(node)));
}

BoundExpr::BoundExpr() : BoundExpr(Rational(0)) {}

BoundExpr::BoundExpr(const Rational& value) : node_(make(Kind::constant, value, {}, {}).node_) {}

BoundExpr BoundExpr::param(const std::string& name) { return make(Kind::parameter, 0, name, {}); }

BoundExpr BoundExpr::sum(std::vector<BoundExpr> terms) {
  std::vector<BoundExpr> flat;
  Rational constant = 0;
  for (auto& t : terms) {
    if (t.kind() == Kind::sum) {
      for (const auto& c : t.children()) {
        if (c.is_constant())
          constant += c.value();
        else
          flat.push_back(c);
      }
    } else if (t.is_constant()) {
      constant += t.value();
    } else {
      flat.push_back(std::move(t));
    }
  }
  // Collect like terms c*X.
  std::vector<std::pair<BoundExpr, Rational>> like;
  for (auto& t : flat) {
    Rational c = 1;
    BoundExpr rest = t;
    if (t.kind() == Kind::product && t.children()[0].is_constant()) {
      c = t.children()[0].value();
      rest = product(std::vector<BoundExpr>(t.children().begin() + 1, t.children().end()));
    }
    auto it = std::find_if(like.begin(), like.end(), [&](const auto& e) { return e.first.to_string() == rest.to_string(); });
    if (it == like.end())
      like.emplace_back(rest, c);
    else
      it->second += c;
  }
  flat.clear();
  for (auto& [rest, c] : like)
    if (c != 0) flat.push_back(c == 1 ? rest : product({BoundExpr(c), rest}));
  if (constant != 0 || flat.empty()) flat.emplace_back(constant);
  if (flat.size() == 1) return flat[0];
  std::sort(flat.begin(), flat.end(), [](const BoundExpr& a, const BoundExpr& b) {
    if (a.is_constant() != b.is_constant()) return b.is_constant();
    return a.to_string() < b.to_string();
  });
  return make(Kind::sum, 0, {}, std::move(flat));
}

BoundExpr BoundExpr::product(std::vector<BoundExpr> factors) {
  std::vector<BoundExpr> flat;
  Rational constant = 1;
  for (auto& f : factors) {
    if (f.kind() == Kind::product) {
      for (const auto& c : f.children()) {
        if (c.is_constant())
          constant *= c.value();
        else
          flat.push_back(c);
      }
    } else if (f.is_constant()) {
      constant *= f.value();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (constant == 0) return BoundExpr(0);
  // Merge repeated bases into one power.
  std::vector<std::pair<BoundExpr, Rational>> bases;
  for (auto& f : flat) {
    BoundExpr base = f.kind() == Kind::power ? f.children()[0] : f;
    Rational e = f.kind() == Kind::power ? f.value() : Rational(1);
    auto it = std::find_if(bases.begin(), bases.end(), [&](const auto& b) { return b.first.to_string() == base.to_string(); });
    if (it == bases.end())
      bases.emplace_back(base, e);
    else
      it->second += e;
  }
  if (bases.size() < flat.size()) {
    std::vector<BoundExpr> merged{BoundExpr(constant)};
    for (auto& [b, e] : bases) merged.push_back(power(b, e));
    return product(std::move(merged));
  }
  if (flat.empty()) return BoundExpr(constant);
  std::sort(flat.begin(), flat.end(), key_less);
  if (constant != 1) flat.insert(flat.begin(), BoundExpr(constant));
  if (flat.size() == 1) return flat[0];
  return make(Kind::product, 0, {}, std::move(flat));
}

BoundExpr BoundExpr::quotient(const BoundExpr& num, const BoundExpr& den) {
  if (den.is_constant() && den.value() != 0) return product({num, BoundExpr(Rational(1) / den.value())});
  if (num.is_zero() && !den.is_zero()) return BoundExpr(0);
  return make(Kind::quotient, 0, {}, {num, den});
}

BoundExpr BoundExpr::power(const BoundExpr& base, const Rational& exponent) {
  if (exponent == 0) return BoundExpr(1);
  if (exponent == 1) return base;
  if (base.is_constant())
    if (auto v = rational_power(base.value(), exponent)) return BoundExpr(*v);
  if (base.kind() == Kind::power) return power(base.children()[0], base.value() * exponent);
  return make(Kind::power, exponent, {}, {base});
}

BoundExpr BoundExpr::floor(const BoundExpr& arg) {
  if (arg.is_constant()) return BoundExpr(Rational(floor_of(arg.value())));
  return make(Kind::floor, 0, {}, {arg});
}

BoundExpr BoundExpr::min(std::vector<BoundExpr> args) {
  if (args.empty()) throw std::invalid_argument("min of no arguments");
  if (std::all_of(args.begin(), args.end(), [](const BoundExpr& a) { return a.is_constant(); }))
    return *std::min_element(args.begin(), args.end(),
                             [](const BoundExpr& a, const BoundExpr& b) { return a.value() < b.value(); });
  if (args.size() == 1) return args[0];
  std::sort(args.begin(), args.end(), key_less);
  return make(Kind::min, 0, {}, std::move(args));
}

BoundExpr BoundExpr::max(std::vector<BoundExpr> args) {
  if (args.empty()) throw std::invalid_argument("max of no arguments");
  if (std::all_of(args.begin(), args.end(), [](const BoundExpr& a) { return a.is_constant(); }))
    return *std::max_element(args.begin(), args.end(),
                             [](const BoundExpr& a, const BoundExpr& b) { return a.value() < b.value(); });
  if (args.size() == 1) return args[0];
  std::sort(args.begin(), args.end(), key_less);
  return make(Kind::max, 0, {}, std::move(args));
}

BoundExpr BoundExpr::from_poly(const Poly& p) {
  std::vector<BoundExpr> terms;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    std::vector<BoundExpr> factors{BoundExpr(it->second)};
    for (const auto& [v, e] : it->first) factors.push_back(power(param(v), e));
    terms.push_back(product(std::move(factors)));
  }
  return sum(std::move(terms));
}

BoundExpr BoundExpr::from_rational_function(const RationalFunction& f) {
  return quotient(from_poly(f.numerator()), from_poly(f.denominator()));
}

BoundExpr::Kind BoundExpr::kind() const { return node_->kind; }
const Rational& BoundExpr::value() const { return node_->value; }
const std::string& BoundExpr::name() const { return node_->name; }
const std::vector<BoundExpr>& BoundExpr::children() const { return node_->children; }
const std::string& BoundExpr::to_string() const { return node_->key; }

std::set<std::string> BoundExpr::symbols() const {
  std::set<std::string> out;
  if (kind() == Kind::parameter) out.insert(name());
  for (const auto& c : children()) {
    auto s = c.symbols();
    out.insert(s.begin(), s.end());
  }
  return out;
}

bool BoundExpr::depends_on(const std::string& n) const { return symbols().count(n) > 0; }

BoundExpr BoundExpr::substitute(const std::string& n, const BoundExpr& v) const {
  switch (kind()) {
    case Kind::constant:
      return *this;
    case Kind::parameter:
      return name() == n ? v : *this;
    default:
      break;
  }
  std::vector<BoundExpr> ch;
  for (const auto& c : children()) ch.push_back(c.substitute(n, v));
  switch (kind()) {
    case Kind::sum:
      return sum(std::move(ch));
    case Kind::product:
      return product(std::move(ch));
    case Kind::quotient:
      return quotient(ch[0], ch[1]);
    case Kind::power:
      return power(ch[0], value());
    case Kind::floor:
      return floor(ch[0]);
    case Kind::min:
      return min(std::move(ch));
    case Kind::max:
      return max(std::move(ch));
    default:
      return *this;
  }
}

std::optional<RationalFunction> BoundExpr::as_rational_function() const {
  switch (kind()) {
    case Kind::constant:
      return RationalFunction(Poly(value()));
    case Kind::parameter:
      return RationalFunction(Poly::variable(name()));
    case Kind::sum: {
      RationalFunction acc;
      for (const auto& c : children()) {
        auto f = c.as_rational_function();
        if (!f) return std::nullopt;
        acc = acc + *f;
      }
      return acc;
    }
    case Kind::product: {
      RationalFunction acc(Poly(1));
      for (const auto& c : children()) {
        auto f = c.as_rational_function();
        if (!f) return std::nullopt;
        acc = acc * *f;
      }
      return acc;
    }
    case Kind::quotient: {
      auto a = children()[0].as_rational_function();
      auto b = children()[1].as_rational_function();
      if (!a || !b || b->numerator().is_zero()) return std::nullopt;
      return *a / *b;
    }
    case Kind::power: {
      if (!is_integer(value())) return std::nullopt;
      auto a = children()[0].as_rational_function();
      if (!a) return std::nullopt;
      long e = numerator_of(value()).convert_to<long>();
      if (e < 0 && a->numerator().is_zero()) return std::nullopt;
      return a->pow(e);
    }
    default:
      return std::nullopt;
  }
}

BoundExpr BoundExpr::normalized() const {
  if (auto f = as_rational_function()) return from_rational_function(*f);
  return *this;
}

std::string BoundExpr::normalized_string() const {
  if (auto f = as_rational_function()) return f->to_string();
  return to_string();
}

bool BoundExpr::equivalent(const BoundExpr& other) const {
  auto a = as_rational_function(), b = other.as_rational_function();
  if (a && b) return (*a - *b).numerator().is_zero();
  return normalized_string() == other.normalized_string();
}

Rational evaluate(const BoundExpr& e, const Valuation& v) {
  using K = BoundExpr::Kind;
  switch (e.kind()) {
    case K::constant:
      return e.value();
    case K::parameter: {
      auto it = v.find(e.name());
      if (it == v.end()) throw EvaluationError("unbound symbol", e.name());
      return it->second;
    }
    case K::sum: {
      Rational s = 0;
      for (const auto& c : e.children()) s += evaluate(c, v);
      return s;
    }
    case K::product: {
      // Fractional powers sharing a root degree are combined before the root is taken.
      Rational p = 1;
      std::map<BigInt, Rational> radicands;
      for (const auto& c : e.children()) {
        if (c.kind() != K::power || denominator_of(c.value()) == 1) {
          p *= evaluate(c, v);
          continue;
        }
        Rational b = evaluate(c.children()[0], v);
        if (b == 0 && c.value() < 0) throw EvaluationError("division by zero", c.to_string());
        if (b < 0) throw EvaluationError("irrational value", c.to_string());
        BigInt q = denominator_of(c.value());
        auto [it, fresh] = radicands.emplace(q, Rational(1));
        it->second *= pow_int(b, numerator_of(c.value()).convert_to<long>());
      }
      for (const auto& [q, r] : radicands) {
        auto root = rational_power(r, Rational(BigInt(1), q));
        if (!root) throw EvaluationError("irrational value", e.to_string());
        p *= *root;
      }
      return p;
    }
    case K::quotient: {
      Rational d = evaluate(e.children()[1], v);
      if (d == 0) throw EvaluationError("division by zero", e.children()[1].to_string());
      return evaluate(e.children()[0], v) / d;
    }
    case K::power: {
      Rational b = evaluate(e.children()[0], v);
      if (b == 0 && e.value() < 0) throw EvaluationError("division by zero", e.to_string());
      auto r = rational_power(b, e.value());
      if (!r) throw EvaluationError("irrational value", e.to_string());
      return *r;
    }
    case K::floor:
      return Rational(floor_of(evaluate(e.children()[0], v)));
    case K::min:
    case K::max: {
      Rational best = evaluate(e.children()[0], v);
      for (std::size_t i = 1; i < e.children().size(); ++i) {
        Rational x = evaluate(e.children()[i], v);
        if (e.kind() == K::min ? x < best : x > best) best = x;
      }
      return best;
    }
  }
  return 0;
}

namespace {

Interval mul(const Interval& a, const Interval& b) {
  Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Interval int_pow(const Interval& a, long e) {
  if (e < 0) {
    if (a.lo <= 0 && a.hi >= 0) throw EvaluationError("division by zero", "interval power");
    Interval p = int_pow(a, -e);
    return {Rational(1) / p.hi, Rational(1) / p.lo};
  }
  Rational l = pow_int(a.lo, e), h = pow_int(a.hi, e);
  if (e % 2 == 0) {
    if (a.lo <= 0 && a.hi >= 0) return {0, std::max(l, h)};
    return {std::min(l, h), std::max(l, h)};
  }
  return {l, h};
}

// Lower and upper bracket of r^(1/q), r >= 0.
Interval root_bracket(const Rational& r, unsigned q, unsigned bits) {
  if (auto exact = exact_root(r, q)) return {*exact, *exact};
  BigInt scale = BigInt(1) << (q * bits);
  BigInt t = floor_of(r * Rational(scale));
  BigInt m = integer_root(t, q);
  Rational unit = Rational(1) / Rational(BigInt(1) << bits);
  return {Rational(m) * unit, Rational(m + 1) * unit};
}

}  // namespace

Interval enclose(const BoundExpr& e, const Valuation& v, unsigned bits) {
  using K = BoundExpr::Kind;
  switch (e.kind()) {
    case K::constant:
    case K::parameter: {
      Rational x = evaluate(e, v);
      return {x, x};
    }
    case K::sum: {
      Interval s{0, 0};
      for (const auto& c : e.children()) {
        Interval x = enclose(c, v, bits);
        s.lo += x.lo;
        s.hi += x.hi;
      }
      return s;
    }
    case K::product: {
      Interval p{1, 1};
      for (const auto& c : e.children()) p = mul(p, enclose(c, v, bits));
      return p;
    }
    case K::quotient: {
      Interval d = enclose(e.children()[1], v, bits);
      if (d.lo <= 0 && d.hi >= 0) throw EvaluationError("division by zero", e.children()[1].to_string());
      return mul(enclose(e.children()[0], v, bits), {Rational(1) / d.hi, Rational(1) / d.lo});
    }
    case K::power: {
      Interval b = enclose(e.children()[0], v, bits);
      long p = numerator_of(e.value()).convert_to<long>();
      unsigned q = denominator_of(e.value()).convert_to<unsigned>();
      if (q == 1) return int_pow(b, p);
      if (b.lo < 0) throw EvaluationError("fractional power of a negative value", e.to_string());
      Interval root{root_bracket(b.lo, q, bits).lo, root_bracket(b.hi, q, bits).hi};
      return int_pow(root, p);
    }
    case K::floor: {
      Interval x = enclose(e.children()[0], v, bits);
      return {Rational(floor_of(x.lo)), Rational(floor_of(x.hi))};
    }
    case K::min:
    case K::max: {
      Interval best = enclose(e.children()[0], v, bits);
      for (std::size_t i = 1; i < e.children().size(); ++i) {
        Interval x = enclose(e.children()[i], v, bits);
        if (e.kind() == K::min) {
          best.lo = std::min(best.lo, x.lo);
          best.hi = std::min(best.hi, x.hi);
        } else {
          best.lo = std::max(best.lo, x.lo);
          best.hi = std::max(best.hi, x.hi);
        }
      }
      return best;
    }
  }
  return {0, 0};
}

Valuation valuation_from(const std::map<std::string, std::int64_t, std::less<>>& binding) {
  Valuation v;
  for (const auto& [k, x] : binding) v.emplace(k, Rational(x));
  return v;
}

}  // namespace iolb
