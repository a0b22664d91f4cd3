#include "doctest.h"
#include "iolb/sampling.hpp"

#include <algorithm>
#include <random>

using namespace iolb;

namespace {

bool adjacent(const Cdag& g, const std::vector<NodeId>& E, NodeId w) {
  for (NodeId v : E) {
    auto s = g.successors(v);
    auto p = g.predecessors(v);
    if (std::find(s.begin(), s.end(), w) != s.end() || std::find(p.begin(), p.end(), w) != p.end()) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("sampled sets are convex, K-bounded and maximal among neighbours") {
  for (auto [name, binding] : {std::pair<const char*, Binding>{"mgs", {{"M", 4}, {"N", 4}}},
                               {"hh_a2v", {{"M", 5}, {"N", 3}}},
                               {"gehd2", {{"N", 5}}}}) {
    CAPTURE(name);
    auto g = Cdag::instantiate(builtin_kernel(name), binding);
    ConvexSampler sampler(g);
    std::mt19937_64 rng(11);
    for (std::size_t K : {3u, 6u, 10u}) {
      for (int n = 0; n < 40; ++n) {
        auto E = sampler.sample(K, rng);
        REQUIRE(!E.empty());
        CHECK(is_convex(g, E));
        CHECK(inset(g, E).size() == sampler.inset_size());
        if (E.size() > 1) CHECK(inset(g, E).size() <= K);
        for (NodeId w = static_cast<NodeId>(g.input_count()); w < g.size(); ++w) {
          if (std::binary_search(E.begin(), E.end(), w) || !adjacent(g, E, w)) continue;
          auto F = E;
          F.insert(std::upper_bound(F.begin(), F.end(), w), w);
          CHECK((!is_convex(g, F) || inset(g, F).size() > K));
        }
      }
    }
  }
}

TEST_CASE("tiny budget leaves single nodes") {
  auto g = Cdag::instantiate(builtin_kernel("mgs"), {{"M", 3}, {"N", 3}});
  ConvexSampler sampler(g);
  std::mt19937_64 rng(0);
  for (int n = 0; n < 50; ++n) CHECK(sampler.sample(0, rng).size() == 1);
}

TEST_CASE("sampled sets stay within the exhaustive maximum") {
  // Every convex K-bounded subset of the MGS 2x2 computations, enumerated directly.
  auto g = Cdag::instantiate(builtin_kernel("mgs"), {{"M", 2}, {"N", 2}});
  const int su = g.kernel().statement_index("SU");
  const auto first = static_cast<NodeId>(g.input_count());
  const std::size_t n = g.computation_count();
  REQUIRE(n == 17);
  const std::size_t K = 4;
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<NodeId> E;
    for (std::size_t b = 0; b < n; ++b)
      if (mask >> b & 1u) E.push_back(first + static_cast<NodeId>(b));
    if (inset(g, E).size() > K || !is_convex(g, E)) continue;
    best = std::max<std::size_t>(best, std::count_if(E.begin(), E.end(), [&](NodeId v) { return g.statement_of(v) == su; }));
  }
  CHECK(best == 2);
  ConvexSampler sampler(g);
  std::mt19937_64 rng(3);
  for (int s = 0; s < 500; ++s) {
    auto E = sampler.sample(K, rng);
    if (E.size() == 1) continue;
    CHECK(static_cast<std::size_t>(std::count_if(E.begin(), E.end(), [&](NodeId v) { return g.statement_of(v) == su; })) <= best);
  }
}

TEST_CASE("mgs sampling oracle holds") {
  for (auto [M, N] : {std::pair{6, 5}, {8, 6}}) {
    auto r = verify_sampling(builtin_kernel("mgs"), {{"M", M}, {"N", N}}, 2 * M, 2000, 0);
    CAPTURE(M);
    CHECK(r.statement == "SU");
    CHECK(r.W == M);
    CHECK(r.bound == Rational(8 * M));
    CHECK(r.violations == 0);
    CHECK(r.max_count > 0);
    CHECK(r.max_ratio < 1);
  }
}

TEST_CASE("sampling rejects large graphs") {
  CHECK_THROWS_AS(verify_sampling(builtin_kernel("mgs"), {{"M", 64}, {"N", 64}}, 8, 1, 0), CdagError);
}
