#pragma once

#include "iolb/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace iolb {

using Valuation = std::map<std::string, Rational, std::less<>>;

// Sparse monomial: (variable, exponent) pairs sorted by variable name, exponents > 0.
using Monomial = std::vector<std::pair<std::string, int>>;

int degree(const Monomial& m);
// Graded lexicographic order; variables earlier in the alphabet rank higher.
bool monomial_less(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return monomial_less(a, b); }
};

class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Poly() = default;
  Poly(const Rational& c);  // NOLINT(implicit)
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(implicit)
  static Poly variable(const std::string& name, int exponent = 1);
  static Poly term(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // coefficient of the empty monomial
  std::set<std::string> variables() const;
  int degree_in(const std::string& var) const;
  int total_degree() const;
  const Monomial& leading_monomial() const;
  const Rational& leading_coefficient() const;

  Rational evaluate(const Valuation& v) const;
  Poly substitute(const std::string& var, const Poly& value) const;
  // Coefficients of powers of `var`, each free of `var`.
  std::map<int, Poly> coefficients_in(const std::string& var) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  Poly pow(unsigned e) const;

  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

// a / b when b divides a exactly, otherwise nullopt.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
// Monic greatest common divisor over Q[vars]; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);
// Sum of p over var in [lower, upper), as a polynomial identity.
Poly sum_over(const Poly& p, const std::string& var, const Poly& lower, const Poly& upper);

// num / den in lowest terms with a monic denominator.
class RationalFunction {
 public:
  RationalFunction() : num_(0), den_(1) {}
  RationalFunction(Poly num) : num_(std::move(num)), den_(1) {}  // NOLINT(implicit)
  RationalFunction(Poly num, Poly den);

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_polynomial() const { return den_.is_constant(); }

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  RationalFunction pow(long e) const;
  RationalFunction substitute(const std::string& var, const RationalFunction& value) const;

  // Throws std::domain_error when the denominator vanishes.
  Rational evaluate(const Valuation& v) const;
  std::string to_string() const;

 private:
  void normalize();
  Poly num_, den_;
};

}  // namespace iolb
