#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace iolb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

BigInt floor_of(const Rational& r);
BigInt ceil_of(const Rational& r);
bool is_integer(const Rational& r);

std::string to_string(const Rational& r);
std::string to_string(const BigInt& v);
double to_double(const Rational& r);
// Decimal rendering with `digits` significant digits.
std::string to_decimal(const Rational& r, int digits = 6);

// floor(v^(1/q)) for v >= 0, q >= 1.
BigInt integer_root(const BigInt& v, unsigned q);
BigInt pow_int(const BigInt& base, unsigned e);
Rational pow_int(const Rational& base, long e);

}  // namespace iolb
