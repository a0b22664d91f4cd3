#include "doctest.h"
#include "iolb/kernel.hpp"

#include <set>
#include <tuple>

using namespace iolb;
using IV = std::vector<std::int64_t>;

TEST_CASE("mgs statements and accesses") {
  AffineKernel k = builtin_kernel("mgs");
  const Statement& sr = k.statement("SR");
  CHECK(sr.write.to_string() == "R[k][j]");
  REQUIRE(sr.reads.size() == 3);
  CHECK(sr.reads[1].to_string() == "Q[i][k]");
  CHECK(sr.reads[2].to_string() == "A[i][j]");
  const Statement& su = k.statement("SU");
  CHECK(su.write.to_string() == "A[i][j]");
  CHECK(su.domain.indices() == std::vector<std::string>{"k", "j", "i"});
  CHECK(k.outputs() == std::vector<std::string>{"Q", "R"});
}

TEST_CASE("enumerate_instances") {
  AffineKernel k = builtin_kernel("mgs");
  auto su = k.enumerate_instances("SU", {{"M", 2}, {"N", 2}});
  CHECK(su == std::vector<IV>{{0, 1, 0}, {0, 1, 1}});
  CHECK(k.enumerate_instances("SU", {{"M", 4}, {"N", 1}}).empty());
  CHECK(k.enumerate_instances("SR", {{"M", 3}, {"N", 3}}).size() == 9);
  CHECK(k.total_instances({{"M", 2}, {"N", 2}}) == 17);
}

TEST_CASE("a2v SU domain matches its set definition") {
  AffineKernel k = builtin_kernel("hh_a2v");
  for (std::int64_t M = 1; M <= 7; ++M)
    for (std::int64_t N = 1; N <= M; ++N) {
      std::vector<IV> expect;
      for (std::int64_t kk = 0; kk < N; ++kk)
        for (std::int64_t j = kk + 1; j < N; ++j)
          for (std::int64_t i = kk + 1; i < M; ++i) expect.push_back({kk, j, i});
      CHECK(k.enumerate_instances("SU", {{"M", M}, {"N", N}}) == expect);
    }
}

TEST_CASE("v2q runs its outer loop downwards") {
  AffineKernel k = builtin_kernel("hh_v2q");
  auto su = k.enumerate_instances("SU", {{"M", 5}, {"N", 3}});
  REQUIRE(!su.empty());
  CHECK(su.front() == IV{1, 2, 2});
  CHECK(su.back() == IV{0, 2, 4});
  auto akk = k.enumerate_instances("akk", {{"M", 5}, {"N", 3}});
  CHECK(akk == std::vector<IV>{{2}, {1}, {0}});
}

TEST_CASE("gehd2 statement order within a step") {
  AffineKernel k = builtin_kernel("gehd2");
  std::vector<std::string> order;
  k.for_each_instance({{"N", 4}}, [&](int s, std::span<const std::int64_t> iv) {
    if (iv[0] != 0) return;
    const std::string& l = k.statements()[static_cast<std::size_t>(s)].label;
    if (order.empty() || order.back() != l) order.push_back(l);
  });
  auto pos = [&](const std::string& l) { return std::find(order.begin(), order.end(), l) - order.begin(); };
  CHECK(pos("c_upd") < pos("r_init"));
  CHECK(pos("r_upd") == static_cast<long>(order.size()) - 1);
}

TEST_CASE("unknown kernels and malformed kernels are rejected") {
  CHECK_THROWS_AS(builtin_kernel("gebd2"), KernelError);
  KernelBuilder b("bad");
  AffineExpr N = b.parameter("N");
  b.loop("i", 0, N, [&](const AffineExpr&) {
    b.statement("S", access("X", {AffineExpr::symbol("q")}), {});
  });
  CHECK_THROWS_AS(b.build(), KernelError);

  KernelBuilder dup("dup");
  AffineExpr P = dup.parameter("N");
  dup.loop("i", 0, P, [&](const AffineExpr& i) {
    dup.statement("S", access("X", {i}), {});
    dup.statement("S", access("Y", {i}), {});
  });
  CHECK_THROWS_AS(dup.build(), KernelError);
}

TEST_CASE("unbound parameters are reported") {
  AffineKernel k = builtin_kernel("mgs");
  CHECK_THROWS_AS(k.total_instances({{"M", 3}}), KernelError);
}

TEST_CASE("instance counts agree with direct loop expansion") {
  AffineKernel k = builtin_kernel("gehd2");
  for (std::int64_t N = 1; N <= 8; ++N) {
    std::uint64_t c_upd = 0, r_upd = 0;
    for (std::int64_t j = 0; j < N - 2; ++j) {
      c_upd += static_cast<std::uint64_t>((N - j - 2) * (N - j - 1));
      r_upd += static_cast<std::uint64_t>(N * (N - j - 2));
    }
    CHECK(k.instance_count(k.statement_index("c_upd"), {{"N", N}}) == c_upd);
    CHECK(k.instance_count(k.statement_index("r_upd"), {{"N", N}}) == r_upd);
  }
}
