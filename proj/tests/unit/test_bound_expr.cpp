#include "doctest.h"
#include "iolb/bound_expr.hpp"

using namespace iolb;

namespace {
BoundExpr P(const char* n) { return BoundExpr::param(n); }
Valuation at(long M, long N, long S) { return {{"M", M}, {"N", N}, {"S", S}}; }
}  // namespace

TEST_CASE("closed-form bounds evaluate exactly") {
  BoundExpr M = P("M"), N = P("N"), S = P("S");
  BoundExpr general = M * M * N * (N - 1) / (8 * (S + M));
  CHECK(evaluate(general, at(32, 16, 64)) == 320);
  BoundExpr small = (M - S) * N * (N - 1) / 4;
  CHECK(evaluate(small, at(64, 8, 16)) == 672);
  CHECK(evaluate(general, at(32, 1, 64)) == 0);
  CHECK(evaluate(small, at(32, 1, 4)) == 0);
}

TEST_CASE("structural normalization flattens and sorts") {
  BoundExpr a = P("N") + (P("M") + 3) + 2;
  BoundExpr b = (5 + P("M")) + P("N");
  CHECK(a.to_string() == b.to_string());
  CHECK(a.to_string() == "M + N + 5");
  BoundExpr c = P("S") * (P("M") * 2);
  CHECK(c.to_string() == "2*M*S");
  CHECK((P("M") * 0).is_zero());
  CHECK((P("M") - P("M")).normalized_string() == "0");
}

TEST_CASE("rational-function normalization decides equality") {
  BoundExpr M = P("M"), N = P("N"), S = P("S");
  BoundExpr x = M * M * N * (N - 1) / (8 * (S + M));
  BoundExpr y = (N * N * M * M - N * M * M) / (8 * M + 8 * S);
  CHECK(x.normalized_string() == y.normalized_string());
  CHECK(x.equivalent(y));
  CHECK_FALSE(x.equivalent(y + 1));
  BoundExpr z = (M * N) / (M * (N + 1)) * (N + 1);
  CHECK(z.normalized_string() == "N");
}

TEST_CASE("fractional powers") {
  BoundExpr K = 2 * P("S");
  BoundExpr e = BoundExpr::power(K, Rational(3, 2));
  CHECK(evaluate(e, at(1, 1, 8)) == 64);
  CHECK_THROWS_AS(evaluate(e, at(1, 1, 3)), EvaluationError);
  Interval iv = enclose(e, at(1, 1, 3));
  // 6^{3/2} = 14.69693845...
  CHECK(iv.lo <= Rational(14696939, 1000000));
  CHECK(iv.hi >= Rational(14696938, 1000000));
  CHECK(iv.hi - iv.lo < Rational(1, 1000000));
  CHECK_FALSE(e.as_rational_function().has_value());
  CHECK(BoundExpr::power(BoundExpr(Rational(9, 4)), Rational(1, 2)).value() == Rational(3, 2));
}

TEST_CASE("division by zero names the offending subexpression") {
  BoundExpr W = P("M") - P("N");
  BoundExpr b = P("S") / W;
  try {
    evaluate(b, at(4, 4, 1));
    FAIL("expected an error");
  } catch (const EvaluationError& err) {
    CHECK(err.subexpression() == W.to_string());
  }
}

TEST_CASE("floor, min and max") {
  BoundExpr B = BoundExpr::floor(P("S") / P("M")) - 1;
  CHECK(evaluate(B, at(16, 1, 64)) == 3);
  CHECK(evaluate(B, at(16, 1, 65)) == 3);
  BoundExpr m = BoundExpr::min({P("M"), P("N")});
  CHECK(evaluate(m, at(7, 3, 1)) == 3);
  CHECK(evaluate(BoundExpr::max({P("M"), P("N")}), at(7, 3, 1)) == 7);
  CHECK(BoundExpr::min({BoundExpr(3), BoundExpr(2)}).value() == 2);
  Interval f = enclose(B, at(16, 1, 64));
  CHECK(f.is_point());
}

TEST_CASE("substitution") {
  BoundExpr e = P("K") * P("K") / P("M") + 2 * P("K");
  BoundExpr s = e.substitute("K", 2 * P("S"));
  CHECK(evaluate(s, at(4, 1, 2)) == 4 + 8);
  CHECK_FALSE(s.depends_on("K"));
  CHECK(s.symbols() == std::set<std::string>{"M", "S"});
}
