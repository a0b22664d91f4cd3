#include "doctest.h"
#include "iolb/rational.hpp"

using namespace iolb;

TEST_CASE("floor and ceil of signed rationals") {
  CHECK(floor_of(Rational(7, 2)) == 3);
  CHECK(floor_of(Rational(-7, 2)) == -4);
  CHECK(ceil_of(Rational(7, 2)) == 4);
  CHECK(ceil_of(Rational(-7, 2)) == -3);
  CHECK(floor_of(Rational(6)) == 6);
}

TEST_CASE("integer roots") {
  CHECK(integer_root(BigInt(0), 2) == 0);
  CHECK(integer_root(BigInt(15), 2) == 3);
  CHECK(integer_root(BigInt(16), 2) == 4);
  CHECK(integer_root(BigInt(26), 3) == 2);
  CHECK(integer_root(BigInt(27), 3) == 3);
  BigInt big = pow_int(BigInt(123456789), 5);
  CHECK(integer_root(big, 5) == 123456789);
  CHECK(integer_root(big - 1, 5) == 123456788);
}

TEST_CASE("rendering") {
  CHECK(to_string(Rational(-3, 6)) == "-1/2");
  CHECK(to_string(Rational(320)) == "320");
  CHECK(to_decimal(Rational(2731, 1)) == "2731");
  CHECK(to_decimal(Rational(1, 3)) == "0.333333");
  CHECK(pow_int(Rational(2, 3), -2) == Rational(9, 4));
}
