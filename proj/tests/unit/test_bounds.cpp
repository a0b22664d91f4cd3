#include "doctest.h"
#include "iolb/bounds.hpp"

#include <cmath>

using namespace iolb;

namespace {

BoundExpr P(const char* n) { return BoundExpr::param(n); }
BoundExpr C(long n) { return BoundExpr(Rational(n)); }

std::vector<std::string> kept_sets(const std::vector<Projection>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.to_string());
  return out;
}

Rational value(const DerivedBound& b, const Binding& binding) {
  auto v = evaluate_bound(b, binding);
  REQUIRE(v.applicable);
  REQUIRE(v.exact);
  return *v.exact;
}

}  // namespace

TEST_CASE("inset projections follow the read subscripts") {
  CHECK(kept_sets(inset_projections(builtin_kernel("mgs"), "SU")) ==
        std::vector<std::string>{"phi_{i,j}", "phi_{i,k}", "phi_{k,j}"});
  CHECK(kept_sets(inset_projections(builtin_kernel("hh_a2v"), "SU")) ==
        std::vector<std::string>{"phi_{i,j}", "phi_{i,k}", "phi_{k,j}"});
  KernelBuilder b("single");
  auto N = b.parameter("N");
  b.loop("i", 0, N, [&](const AffineExpr& i) { b.statement("S0", access("Y", {i}), {access("X", {i})}); });
  b.output("Y");
  CHECK(kept_sets(inset_projections(b.build(), "S0")) == std::vector<std::string>{"phi_{i}"});
}

TEST_CASE("instance counts are polynomials of the parameters") {
  auto mgs = builtin_kernel("mgs");
  CHECK(instance_count(mgs, "SU").to_string() == Poly(instance_count(mgs, "SU")).to_string());
  for (std::int64_t m : {2, 5, 8})
    for (std::int64_t n : {1, 2, 5}) {
      Binding b{{"M", m}, {"N", n}};
      int s = mgs.statement_index("SU");
      CHECK(instance_count(mgs, "SU").evaluate(valuation_from(b)) == Rational(mgs.instance_count(s, b)));
    }
  auto a2v = builtin_kernel("hh_a2v");
  Binding b{{"M", 9}, {"N", 6}};
  CHECK(instance_count(a2v, "SU").evaluate(valuation_from(b)) ==
        Rational(a2v.instance_count(a2v.statement_index("SU"), b)));
  auto g = builtin_kernel("gehd2");
  for (std::int64_t n : {3, 4, 7}) {
    Binding bn{{"N", n}};
    CHECK(instance_count(g, "c_upd").evaluate(valuation_from(bn)) ==
          Rational(g.instance_count(g.statement_index("c_upd"), bn)));
  }
  CHECK(BoundExpr::from_poly(instance_count(mgs, "SU")).equivalent(P("M") * P("N") * (P("N") - C(1)) / C(2)));
  CHECK(BoundExpr::from_poly(instance_count(mgs, "SU", true))
            .equivalent(P("M") * (P("N") - C(1)) * (P("N") - C(2)) / C(2)));
}

TEST_CASE("I-prime and flatness parts for mgs") {
  auto k = builtin_kernel("mgs");
  auto r = *detect(k, "SU");
  auto ps = inset_projections(k, "SU");
  CHECK(hourglass_Iprime_bound(r, ps).equivalent(P("K") * P("K") / P("M")));
  auto f = hourglass_F_bound(r, ps, C(1));
  CHECK(f.e.normalized_string() == "2");
  CHECK(f.R.normalized_string() == "1");
  CHECK(f.bound.equivalent(C(2) * P("K")));
  CHECK(f.w == std::vector<std::string>{"i", "j"});
  CHECK_FALSE(f.fallback);
}

TEST_CASE("I-prime for a2v under both conventions") {
  auto k = builtin_kernel("hh_a2v");
  auto r = *detect(k, "SU");
  auto ps = inset_projections(k, "SU");
  auto W = P("M") - P("N");
  CHECK(hourglass_Iprime_bound(r, ps, Convention::table).equivalent(P("K") * P("K") / W));
  CHECK(hourglass_Iprime_bound(r, ps, Convention::proof).equivalent(P("K") * P("K") * P("M") / (W * W)));
}

TEST_CASE("hypothetical width K degenerates to K") {
  auto k = builtin_kernel("mgs");
  auto r = *detect(k, "SU");
  r.width_min = P("K");
  CHECK(hourglass_Iprime_bound(r, inset_projections(k, "SU"), Convention::table).equivalent(P("K")));
}

TEST_CASE("flatness falls back to the node count without neutral projections") {
  auto k = builtin_kernel("mgs");
  auto r = *detect(k, "nrm_acc");
  auto f = hourglass_F_bound(r, inset_projections(k, "nrm_acc"), P("X"));
  CHECK(f.fallback);
  CHECK(f.bound.normalized_string() == "X");
}

TEST_CASE("mgs closed-form bounds") {
  auto d = derive(builtin_kernel("mgs"));
  const auto* g = d.find("SU", Regime::general);
  const auto* s = d.find("SU", Regime::small_cache);
  REQUIRE(g);
  REQUIRE(s);
  auto M = P("M"), N = P("N"), S = P("S");
  CHECK(g->q.normalized_string() == (M * M * N * (N - C(1)) / (C(8) * (S + M))).normalized_string());
  CHECK(s->q.equivalent((M - S) * N * (N - C(1)) / C(4)));
  CHECK(value(*g, {{"M", 32}, {"N", 16}, {"S", 64}}) == 320);
  CHECK(value(*s, {{"M", 64}, {"N", 8}, {"S", 16}}) == 672);
  CHECK(value(*g, {{"M", 32}, {"N", 1}, {"S", 64}}) == 0);
  CHECK(value(*s, {{"M", 32}, {"N", 1}, {"S", 16}}) == 0);
  CHECK_FALSE(evaluate_bound(*s, {{"M", 32}, {"N", 8}, {"S", 64}}).applicable);
  CHECK(d.primary_bound().statement == "SU");
}

TEST_CASE("v2q closed-form bound") {
  auto d = derive(builtin_kernel("hh_v2q"));
  const auto* g = d.find("SU", Regime::general);
  REQUIRE(g);
  auto M = P("M"), N = P("N"), S = P("S");
  auto W = M - N;
  auto expected = N * (N - C(1)) * (C(3) * M - N - C(1)) * W * W / (C(24) * (W * W + S * M));
  CHECK(g->q.normalized_string() == expected.normalized_string());
}

TEST_CASE("table convention matches the catalog leading terms") {
  for (std::string k : {"mgs", "hh_a2v", "hh_v2q"}) {
    auto d = derive(builtin_kernel(k), Convention::table);
    const auto* g = d.find("SU", Regime::general);
    REQUIRE(g);
    CAPTURE(k);
    CHECK(g->q.normalized_string() == catalog(k).new_leading.normalized_string());
  }
  auto d = derive(builtin_kernel("gehd2"), Convention::table);
  const auto* g = d.find("c_upd", Regime::general);
  REQUIRE(g);
  CHECK(g->split == std::optional<std::string>("M"));
  CHECK(g->q.normalized_string() == catalog("gehd2").new_leading.normalized_string());
}

TEST_CASE("classical bound") {
  auto k = builtin_kernel("mgs");
  auto count = BoundExpr::from_poly(instance_count(k, "SU"));
  auto c = classical_bound(k, "SU", count);
  CHECK(c.regime == Regime::classical);
  CHECK(c.emax.to_string() == BoundExpr::power(C(2) * P("S"), Rational(3, 2)).to_string());
  auto v = evaluate_bound(c, {{"M", 32}, {"N", 16}, {"S", 64}});
  REQUIRE(v.applicable);
  CHECK_FALSE(v.exact);
  double approx = 64.0 * 32 * 16 * 15 / 2 / std::pow(128.0, 1.5);
  CHECK(to_double(v.enclosure.lo) == doctest::Approx(approx));
  CHECK(v.enclosure.hi - v.enclosure.lo < Rational(1, 1000000));
  auto zero = evaluate_bound(c, {{"M", 32}, {"N", 1}, {"S", 64}});
  REQUIRE(zero.exact);
  CHECK(*zero.exact == 0);
  auto g = classical_bound(builtin_kernel("gehd2"), "c_upd",
                           BoundExpr::from_poly(instance_count(builtin_kernel("gehd2"), "c_upd")));
  CHECK(g.emax.to_string() == c.emax.to_string());
}

TEST_CASE("a2v general regime is not applicable when M = N") {
  auto d = derive(builtin_kernel("hh_a2v"));
  const auto* g = d.find("SU", Regime::general);
  auto v = evaluate_bound(*g, {{"M", 8}, {"N", 8}, {"S", 32}});
  CHECK_FALSE(v.applicable);
  CHECK_FALSE(v.reason.empty());
}

TEST_CASE("gehd2 split is optimised at evaluation") {
  auto d = derive(builtin_kernel("gehd2"));
  const auto* g = d.find("c_upd", Regime::general);
  REQUIRE(g);
  Binding b{{"N", 16}, {"S", 8}};
  auto best = evaluate_bound(*g, b);
  REQUIRE(best.applicable);
  REQUIRE(best.split_value);
  for (std::int64_t m = 1; m <= 14; ++m) {
    Binding bm = b;
    bm["M"] = m;
    auto v = evaluate_bound(*g, bm);
    if (v.applicable) CHECK(*v.exact <= *best.exact);
  }
}

TEST_CASE("hourglass beats classical when M is large against sqrt(S)") {
  for (std::string k : {"mgs", "hh_a2v", "hh_v2q", "gehd2"}) {
    auto d = derive(builtin_kernel(k));
    Binding b{{"M", 64}, {"N", 32}, {"S", 64}};
    if (k == "gehd2") b = {{"N", 128}, {"S", 64}};
    auto h = best_hourglass(d, b);
    auto c = best_classical(d, b);
    REQUIRE(h.bound);
    REQUIRE(c.bound);
    CAPTURE(k);
    CHECK(h.value.enclosure.lo > c.value.enclosure.hi);
  }
}

TEST_CASE("dominance over a sampled grid") {
  auto d = derive(builtin_kernel("mgs"));
  for (std::int64_t M : {4, 8, 16, 32, 64})
    for (std::int64_t N : {2, 4, 8, 16, 32, 64}) {
      if (N > M) continue;
      for (std::int64_t S : {2, 4, 8, 16, 32, 64, 128, 256}) {
        if (static_cast<double>(M) < 4 * std::sqrt(static_cast<double>(S))) continue;
        Binding b{{"M", M}, {"N", N}, {"S", S}};
        auto h = best_hourglass(d, b, "SU");
        auto c = best_classical(d, b, "SU");
        CAPTURE(M);
        CAPTURE(N);
        CAPTURE(S);
        REQUIRE(h.bound);
        CHECK(h.value.enclosure.lo >= c.value.enclosure.lo);
      }
    }
}

TEST_CASE("catalog") {
  auto M = P("M"), N = P("N"), S = P("S");
  CHECK(catalog("mgs").new_leading.equivalent(N * N * M * M / (C(8) * (M + S)) +
                                               (C(2) * M * M - C(3) * N * M * M) / (C(8) * (M + S))));
  REQUIRE(catalog("mgs").upper);
  CHECK(catalog("mgs").upper->equivalent(M * M * N * N / (C(2) * S)));
  CHECK(catalog("hh_a2v").upper);
  CHECK_FALSE(catalog("hh_v2q").upper);
  auto gebd2 = catalog("gebd2").new_leading.as_rational_function();
  REQUIRE(gebd2);
  CHECK(gebd2->denominator().to_string() == "M - N + S + 1");
  CHECK_THROWS_AS(catalog("lu"), KernelError);
  CHECK(catalog_names().size() == 5);
  Valuation v{{"M", 32}, {"N", 16}, {"S", 64}};
  CHECK(evaluate(catalog("mgs").new_leading, v) == Rational(32 * 32 * (256 + 2 - 48), 8 * 96));
}
