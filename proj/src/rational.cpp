#include "iolb/rational.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace iolb {

BigInt floor_of(const Rational& r) {
  BigInt n = numerator_of(r), d = denominator_of(r);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

BigInt ceil_of(const Rational& r) { return -floor_of(-r); }

bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

std::string to_string(const BigInt& v) { return v.str(); }

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_decimal(const Rational& r, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, to_double(r));
  return buf;
}

BigInt pow_int(const BigInt& base, unsigned e) {
  BigInt result = 1, b = base;
  while (e) {
    if (e & 1u) result *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return result;
}

Rational pow_int(const Rational& base, long e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("zero raised to a negative power");
    return pow_int(Rational(1) / base, -e);
  }
  Rational num(pow_int(numerator_of(base), static_cast<unsigned>(e)));
  Rational den(pow_int(denominator_of(base), static_cast<unsigned>(e)));
  return num / den;
}

BigInt integer_root(const BigInt& v, unsigned q) {
  if (v < 0) throw std::domain_error("integer_root of a negative value");
  if (q == 0) throw std::domain_error("zeroth root");
  if (q == 1 || v < 2) return v;
  unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
  BigInt hi = BigInt(1) << (bits / q + 1);
  BigInt lo = 0;
  // invariant: lo^q <= v < hi^q
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (pow_int(mid, q) <= v)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace iolb
