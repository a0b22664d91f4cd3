#pragma once

#include "iolb/polynomial.hpp"
#include "iolb/rational.hpp"

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace iolb {

class EvaluationError : public std::domain_error {
 public:
  EvaluationError(const std::string& what, std::string subexpression)
      : std::domain_error(what + ": " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// Exact rational expression over named parameters.
class BoundExpr {
 public:
  enum class Kind { constant, parameter, sum, product, quotient, power, floor, min, max };

  BoundExpr();
  BoundExpr(const Rational& value);  // NOLINT(implicit)
  BoundExpr(long value) : BoundExpr(Rational(value)) {}  // NOLINT(implicit)
  BoundExpr(int value) : BoundExpr(Rational(value)) {}  // NOLINT(implicit)

  static BoundExpr param(const std::string& name);
  static BoundExpr sum(std::vector<BoundExpr> terms);
  static BoundExpr product(std::vector<BoundExpr> factors);
  static BoundExpr quotient(const BoundExpr& num, const BoundExpr& den);
  static BoundExpr power(const BoundExpr& base, const Rational& exponent);
  static BoundExpr floor(const BoundExpr& arg);
  static BoundExpr min(std::vector<BoundExpr> args);
  static BoundExpr max(std::vector<BoundExpr> args);
  static BoundExpr from_poly(const Poly& p);
  static BoundExpr from_rational_function(const RationalFunction& f);

  Kind kind() const;
  const Rational& value() const;     // constant value or power exponent
  const std::string& name() const;   // parameter name
  const std::vector<BoundExpr>& children() const;

  bool is_constant() const { return kind() == Kind::constant; }
  bool is_zero() const { return is_constant() && value() == 0; }
  std::set<std::string> symbols() const;
  bool depends_on(const std::string& name) const;
  BoundExpr substitute(const std::string& name, const BoundExpr& value) const;

  // Structural form; sums and products are flattened and sorted.
  const std::string& to_string() const;
  // Exact rational-function form when no fractional power, floor, min or max is involved.
  std::optional<RationalFunction> as_rational_function() const;
  BoundExpr normalized() const;
  std::string normalized_string() const;
  bool equivalent(const BoundExpr& other) const;

  friend BoundExpr operator+(const BoundExpr& a, const BoundExpr& b) { return sum({a, b}); }
  friend BoundExpr operator-(const BoundExpr& a, const BoundExpr& b) { return sum({a, product({-1, b})}); }
  friend BoundExpr operator*(const BoundExpr& a, const BoundExpr& b) { return product({a, b}); }
  friend BoundExpr operator/(const BoundExpr& a, const BoundExpr& b) { return quotient(a, b); }
  BoundExpr operator-() const { return product({-1, *this}); }

 private:
  struct Node;
  explicit BoundExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static BoundExpr make(Kind kind, Rational value, std::string name, std::vector<BoundExpr> children);
  std::shared_ptr<const Node> node_;
};

// Exact value; throws EvaluationError on a zero denominator or an irrational result.
Rational evaluate(const BoundExpr& e, const Valuation& v);

struct Interval {
  Rational lo, hi;
  bool is_point() const { return lo == hi; }
};

// Certified enclosure; fractional powers are bracketed to 2^-bits.
Interval enclose(const BoundExpr& e, const Valuation& v, unsigned bits = 64);

Valuation valuation_from(const std::map<std::string, std::int64_t, std::less<>>& binding);

}  // namespace iolb
