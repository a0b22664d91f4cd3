#include "doctest.h"
#include "iolb/polynomial.hpp"

using namespace iolb;

namespace {
Poly v(const char* n) { return Poly::variable(n); }
}  // namespace

TEST_CASE("polynomial arithmetic and rendering") {
  Poly p = (v("M") + Poly(1)) * (v("M") - Poly(1));
  CHECK(p.to_string() == "M^2 - 1");
  CHECK(p.degree_in("M") == 2);
  CHECK(p.evaluate({{"M", Rational(5)}}) == 24);
  CHECK((p - p).is_zero());
  Poly q = Poly(Rational(1, 2)) * v("N") * v("M");
  CHECK(q.to_string() == "1/2*M*N");
}

TEST_CASE("exact division") {
  Poly a = (v("M") + v("S")) * (v("N") - Poly(2)) * v("N");
  auto q = divide_exact(a, v("N") - Poly(2));
  REQUIRE(q);
  CHECK(*q == (v("M") + v("S")) * v("N"));
  CHECK_FALSE(divide_exact(a, v("M") + Poly(1)));
}

TEST_CASE("multivariate gcd") {
  Poly f = v("M") - v("N");
  Poly a = f * (v("S") + v("M")) * Poly(3);
  Poly b = f * f * v("N");
  CHECK(gcd(a, b) == f);
  CHECK(gcd(v("M"), v("N")) == Poly(1));
  CHECK(gcd(Poly(6) * v("M") * v("M"), Poly(4) * v("M")) == v("M"));
}

TEST_CASE("sums over ranges") {
  // sum_{k=0}^{N-1} (N-1-k) M = M N (N-1) / 2
  Poly term = (v("N") - Poly(1) - v("k")) * v("M");
  Poly s = sum_over(term, "k", Poly(0), v("N"));
  CHECK(s == Poly(Rational(1, 2)) * v("M") * v("N") * (v("N") - Poly(1)));
  // sum_{k=0}^{n-1} k^3 at n = 10 is 2025
  Poly cubes = sum_over(v("k").pow(3), "k", Poly(0), v("n"));
  CHECK(cubes.evaluate({{"n", Rational(10)}}) == 2025);
  for (int lo = 0; lo < 4; ++lo)
    for (int hi = lo; hi < 9; ++hi) {
      Rational brute = 0;
      for (int k = lo; k < hi; ++k) brute += Rational(k * k * k * k);
      CHECK(sum_over(v("k").pow(4), "k", Poly(lo), Poly(hi)).constant_value() == brute);
    }
}

TEST_CASE("rational functions reduce to lowest terms with a monic denominator") {
  RationalFunction a(Poly(2) * v("M") * (v("M") + v("S")), Poly(4) * (v("S") + v("M")));
  CHECK(a.denominator() == Poly(1));
  CHECK(a.numerator() == Poly(Rational(1, 2)) * v("M"));
  RationalFunction b(v("M") * v("M"), Poly(8) * v("M") + Poly(8) * v("S"));
  CHECK(b.to_string() == "(1/8*M^2)/(M + S)");
  CHECK_THROWS(RationalFunction(v("M"), Poly(0)));
  RationalFunction sum = RationalFunction(Poly(1), v("M")) + RationalFunction(Poly(1), v("N"));
  CHECK(sum.to_string() == "(M + N)/(M*N)");
  CHECK_THROWS(sum.evaluate({{"M", Rational(0)}, {"N", Rational(1)}}));
}
