#include "doctest.h"
#include "iolb/bounds.hpp"
#include "iolb/pebble.hpp"
#include "iolb/schedules.hpp"

#include <algorithm>
#include <random>

using namespace iolb;

namespace {

AffineKernel chain_kernel() {
  KernelBuilder b("chain");
  auto N = b.parameter("N");
  b.loop("i", 0, N, [&](const AffineExpr& i) { b.statement("T", access("Y", {i + 1}), {access("Y", {i})}); });
  b.output("Y");
  return b.build();
}

Schedule random_topological(const Cdag& g, std::mt19937& rng) {
  std::vector<std::size_t> missing(g.size(), 0);
  std::vector<NodeId> ready;
  for (NodeId v = static_cast<NodeId>(g.input_count()); v < g.size(); ++v) {
    for (NodeId p : g.predecessors(v))
      if (!g.is_input(p)) ++missing[v];
    if (missing[v] == 0) ready.push_back(v);
  }
  Schedule s;
  while (!ready.empty()) {
    std::size_t k = rng() % ready.size();
    NodeId v = ready[k];
    ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(k));
    s.push_back(v);
    for (NodeId w : g.successors(v))
      if (--missing[w] == 0) ready.push_back(w);
  }
  return s;
}

std::size_t inputs_with_consumers(const Cdag& g) {
  std::size_t n = 0;
  for (NodeId v = 0; v < g.input_count(); ++v)
    if (!g.successors(v).empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("a chain needs a single load") {
  for (std::int64_t n : {1, 2, 10}) {
    auto g = Cdag::instantiate(chain_kernel(), {{"N", n}});
    auto s = reference_schedule(g);
    CHECK(run(g, s, 2, Policy::belady).loads == 1);
    CHECK(run(g, s, 2, Policy::lru).loads == 1);
    CHECK(min_loads_for_schedule(g, s, 2) == 1);
  }
}

TEST_CASE("whole cdag in cache loads each input once") {
  auto g = Cdag::instantiate(builtin_kernel("mgs"), {{"M", 2}, {"N", 2}});
  for (auto p : {Policy::belady, Policy::lru}) {
    auto t = run(g, reference_schedule(g), 21, p);
    CHECK(t.loads == 4);
    CHECK(t.stores == 0);
    CHECK(t.peak_red <= 21);
  }
}

TEST_CASE("errors") {
  auto g = Cdag::instantiate(builtin_kernel("mgs"), {{"M", 3}, {"N", 3}});
  auto s = reference_schedule(g);
  CHECK_THROWS_AS(run(g, s, max_in_degree(g), Policy::belady), PebbleError);
  CHECK_NOTHROW(run(g, s, max_in_degree(g) + 1, Policy::belady));
  std::reverse(s.begin(), s.end());
  CHECK_THROWS_AS(run(g, s, 100, Policy::belady), PebbleError);
  CHECK_THROWS_AS(parse_policy("fifo"), std::invalid_argument);
  CHECK(parse_policy("lru") == Policy::lru);
}

TEST_CASE("belady is never worse than lru and matches min_loads") {
  std::mt19937 rng(11);
  for (std::string k : {"mgs", "hh_a2v", "hh_v2q", "gehd2"}) {
    Binding b{{"M", 5}, {"N", 4}};
    if (k == "gehd2") b = {{"N", 5}};
    auto g = Cdag::instantiate(builtin_kernel(k), b);
    std::size_t lo = max_in_degree(g) + 1;
    for (int trial = 0; trial < 10; ++trial) {
      auto s = random_topological(g, rng);
      REQUIRE(is_valid_schedule(g, s));
      std::size_t S = lo + rng() % 12;
      auto bel = run(g, s, S, Policy::belady);
      auto lru = run(g, s, S, Policy::lru);
      CAPTURE(k);
      CHECK(bel.loads <= lru.loads);
      CHECK(bel.loads == min_loads_for_schedule(g, s, S));
      CHECK(bel.loads >= inputs_with_consumers(g));
      CHECK(lru.loads >= inputs_with_consumers(g));
      CHECK(bel.peak_red <= S);
      CHECK(lru.peak_red <= S);
    }
  }
}

TEST_CASE("belady loads do not increase with S") {
  for (std::string k : {"mgs", "hh_a2v", "gehd2"}) {
    Binding b{{"M", 8}, {"N", 6}};
    if (k == "gehd2") b = {{"N", 7}};
    auto g = Cdag::instantiate(builtin_kernel(k), b);
    auto s = reference_schedule(g);
    std::uint64_t prev = ~0ull;
    for (std::size_t S = max_in_degree(g) + 1; S <= 80; ++S) {
      auto loads = run(g, s, S, Policy::belady).loads;
      CHECK(loads <= prev);
      prev = loads;
    }
  }
}

TEST_CASE("traces are deterministic") {
  auto g = Cdag::instantiate(builtin_kernel("hh_a2v"), {{"M", 7}, {"N", 5}});
  auto s = reference_schedule(g);
  auto a = run(g, s, 9, Policy::belady, true);
  auto b = run(g, s, 9, Policy::belady, true);
  CHECK(a.loads == b.loads);
  CHECK(a.stores == b.stores);
  CHECK(a.loads_per_node == b.loads_per_node);
}

TEST_CASE("loads respect the derived lower bound on small instances") {
  for (std::string k : {"mgs", "hh_a2v", "hh_v2q"}) {
    auto d = derive(builtin_kernel(k));
    for (std::int64_t M : {4, 6, 8})
      for (std::int64_t N : {2, 4}) {
        auto g = Cdag::instantiate(builtin_kernel(k), {{"M", M}, {"N", N}});
        for (std::int64_t S : {4, 8, 16}) {
          if (static_cast<std::size_t>(S) <= max_in_degree(g)) continue;
          auto best = best_hourglass(d, {{"M", M}, {"N", N}, {"S", S}});
          if (!best.bound) continue;
          for (auto p : {Policy::belady, Policy::lru}) {
            auto loads = run(g, reference_schedule(g), static_cast<std::size_t>(S), p).loads;
            CAPTURE(k);
            CHECK(Rational(loads) >= best.value.enclosure.hi);
          }
        }
      }
  }
}
