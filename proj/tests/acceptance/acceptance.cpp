#include "iolb/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

using namespace iolb;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

BoundExpr P(const char* n) { return BoundExpr::param(n); }

std::string dec(const Rational& r) { return to_decimal(r, 4); }

Outcome symbolic_reproduction() {
  Outcome o;
  std::ostringstream d;
  auto M = P("M"), N = P("N"), S = P("S");
  auto mgs = derive(builtin_kernel("mgs"));
  const DerivedBound* g = mgs.find("SU", Regime::general);
  BoundExpr closed_form = M * M * N * (N - BoundExpr(1)) / (BoundExpr(8) * (S + M));
  bool ok = g && g->q.equivalent(closed_form);
  d << "mgs " << (ok ? "ok" : "MISMATCH");
  o.pass &= ok;
  for (auto [k, stmt] : {std::pair{"hh_a2v", "SU"}, {"hh_v2q", "SU"}, {"gehd2", "c_upd"}}) {
    auto t = derive(builtin_kernel(k), Convention::table);
    const DerivedBound* b = t.find(stmt, Regime::general);
    bool same = b && b->q.normalized_string() == catalog(k).new_leading.normalized_string();
    d << ", " << k << " " << (same ? "ok" : "MISMATCH");
    o.pass &= same;
  }
  o.detail = d.str();
  return o;
}

const std::vector<std::int64_t> grid_sizes{8, 16, 24, 32};

GridSpec grid_for(const std::string& kernel) {
  if (kernel == "gehd2") return {{}, {"8", "16", "24", "32"}, {"2N+1", "4N", "8N"}};
  return {grid_sizes, {"M/2", "M"}, {"2M+1", "4M", "8M"}};
}

Outcome soundness() {
  Outcome o;
  std::size_t checks = 0, violations = 0, errors = 0;
  for (const auto& k : builtin_kernel_names()) {
    for (Policy p : {Policy::belady, Policy::lru}) {
      for (const auto& row : sweep(k, grid_for(k), p)) {
        Rational lower = 0;
        if (row.hourglass) lower = std::max(lower, row.hourglass->hi);
        if (row.classical) lower = std::max(lower, row.classical->hi);
        if (!row.loads_reference) {
          ++errors;
          continue;
        }
        for (auto loads : {row.loads_reference, row.loads_tiled}) {
          if (!loads) continue;
          ++checks;
          if (Rational(static_cast<std::int64_t>(*loads)) < lower) ++violations;
        }
      }
    }
  }
  o.pass = violations == 0 && errors == 0;
  o.detail = std::to_string(checks) + " (kernel, binding, schedule, policy) runs, " + std::to_string(violations) +
             " violations, " + std::to_string(errors) + " failed rows";
  return o;
}

Outcome upper_bound_match() {
  Outcome o;
  std::ostringstream d;
  auto check = [&](const char* k, Binding b, std::optional<std::int64_t> B, Rational target, Rational tol) {
    auto s = simulate(k, b, ScheduleKind::tiled, B, Policy::belady);
    Rational loads(static_cast<std::int64_t>(s.trace.loads));
    Rational dev = abs(loads - target) / target;
    bool ok = dev <= tol;
    o.pass &= ok;
    d << k << " " << s.schedule_id << " loads " << s.trace.loads << " vs " << dec(target) << " (" << dec(dev * 100)
      << "%, limit " << dec(tol * 100) << "%)";
  };
  {
    Rational M = 16, N = 32;
    check("mgs", {{"M", 16}, {"N", 32}, {"S", 64}}, 3, M * N * N / (2 * 3) + M * N, Rational(1, 10));
  }
  d << "; ";
  {
    Rational M = 24, N = 16, B = default_block({{"M", 24}, {"N", 16}, {"S", 72}});
    check("hh_a2v", {{"M", 24}, {"N", 16}, {"S", 72}}, std::nullopt, (M * N * N - N * N * N / 3) / (2 * B) + M * N,
          Rational(15, 100));
  }
  o.detail = d.str();
  return o;
}

Outcome tightness() {
  Outcome o;
  std::ostringstream d;
  // Part 1: S > 2M on the soundness grid, tiled schedules, ratio to the best hourglass bound.
  for (const char* k : {"mgs", "hh_a2v"}) {
    std::size_t rows = 0, over = 0, no_bound = 0;
    Rational worst = 0;
    std::string worst_at;
    for (const auto& r : sweep(k, grid_for(k), Policy::belady)) {
      if (!r.loads_tiled) continue;
      if (!r.hourglass || r.hourglass->lo <= 0) {
        ++no_bound;
        continue;
      }
      ++rows;
      Rational ratio = Rational(static_cast<std::int64_t>(*r.loads_tiled)) / r.hourglass->lo;
      if (ratio > 8) ++over;
      if (ratio > worst) {
        worst = ratio;
        worst_at = "M=" + std::to_string(r.binding.at("M")) + ",N=" + std::to_string(r.binding.at("N")) +
                   ",S=" + std::to_string(r.binding.at("S"));
      }
    }
    o.pass &= over == 0;
    d << k << " tiled/hourglass <= 8: " << over << "/" << rows << " rows exceed, max " << dec(worst) << " at "
      << worst_at;
    if (no_bound) d << " (" << no_bound << " rows without an applicable hourglass bound)";
    d << "; ";
  }
  // Part 2: S <= M/2 (not present on the soundness grid), reference schedule, small-cache bound.
  {
    AffineKernel kernel = builtin_kernel("mgs");
    Derivation dv = derive(kernel);
    const DerivedBound* sc = dv.find("SU", Regime::small_cache);
    std::size_t rows = 0, over = 0, too_small = 0;
    Rational worst = 0;
    std::string worst_at;
    for (const auto& b : expand_grid({grid_sizes, {"M/2", "M"}, {"M/4", "M/2"}}, true)) {
      BoundValue v = evaluate_bound(*sc, b);
      if (!v.applicable || v.enclosure.lo <= 0) continue;
      std::optional<Simulation> s;
      try {
        s = simulate("mgs", b, ScheduleKind::reference, std::nullopt, Policy::belady, &dv);
      } catch (const PebbleError&) {
        ++too_small;
        continue;
      }
      ++rows;
      Rational ratio = Rational(static_cast<std::int64_t>(s->trace.loads)) / v.enclosure.lo;
      if (ratio > 16) ++over;
      if (ratio > worst) {
        worst = ratio;
        worst_at = "M=" + std::to_string(b.at("M")) + ",N=" + std::to_string(b.at("N")) +
                   ",S=" + std::to_string(b.at("S"));
      }
    }
    o.pass &= over == 0;
    d << "mgs reference/small-cache <= 16 (S in {M/4, M/2}): " << over << "/" << rows << " rows exceed, max "
      << dec(worst) << " at " << worst_at;
    if (too_small) d << " (" << too_small << " bindings skipped: S below the largest step)";
  }
  o.detail = d.str();
  return o;
}

Outcome sampling_oracle() {
  Outcome o;
  std::ostringstream d;
  for (auto [M, N] : {std::pair{6, 5}, {8, 6}}) {
    auto r = verify_sampling(builtin_kernel("mgs"), {{"M", M}, {"N", N}}, static_cast<std::size_t>(2 * M), 2000, 0);
    o.pass &= r.passed();
    d << "(" << M << "," << N << ") K=" << r.K << ": " << r.violations << " violations, max |E cap SU| "
      << r.max_count << " <= " << to_string(r.bound) << "; ";
  }
  o.detail = d.str();
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome brascamp_lieb() {
  Outcome o;
  std::vector<std::string> dims{"i", "j", "k"};
  std::vector<Projection> ps{{{"i", "j"}, BoundExpr(1)}, {{"i", "k"}, BoundExpr(1)}, {{"j", "k"}, BoundExpr(1)}};
  auto cert = bl_exponents(dims, ps);
  bool half = cert.verified && cert.exponents == std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1, 2)};
  std::size_t boxes = 0, exact = 0;
  for (int a = 1; a <= 10; ++a)
    for (int b = 1; b <= 10; ++b)
      for (int c = 1; c <= 10; ++c) {
        std::set<std::pair<int, int>> ij, ik, jk;
        std::size_t points = 0;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < b; ++j)
            for (int k = 0; k < c; ++k) {
              ij.insert({i, j});
              ik.insert({i, k});
              jk.insert({j, k});
              ++points;
            }
        std::vector<Projection> box{{{"i", "j"}, BoundExpr(Rational(static_cast<std::int64_t>(ij.size())))},
                                    {{"i", "k"}, BoundExpr(Rational(static_cast<std::int64_t>(ik.size())))},
                                    {{"j", "k"}, BoundExpr(Rational(static_cast<std::int64_t>(jk.size())))}};
        ++boxes;
        if (evaluate(bl_product(box, cert.exponents), {}) == Rational(static_cast<std::int64_t>(points))) ++exact;
      }
  o.pass = half && exact == boxes;
  std::ostringstream d;
  d << "exponents (";
  for (std::size_t i = 0; i < cert.exponents.size(); ++i) d << (i ? "," : "") << to_string(cert.exponents[i]);
  d << "), box equality " << exact << "/" << boxes;
  o.detail = d.str();
  return o;
}

Outcome detection() {
  Outcome o;
  std::ostringstream d;
  auto M = P("M"), N = P("N");
  auto mgs = detect(builtin_kernel("mgs"), "SU");
  bool w = mgs && mgs->width && mgs->width->equivalent(BoundExpr(2) * M);
  auto a2v = detect(builtin_kernel("hh_a2v"), "SU");
  bool a = a2v && a2v->width_min.equivalent(M - N);
  auto [lo, hi] = split_temporal(builtin_kernel("gehd2"), "c_upd", "M");
  auto frag = detect(lo, "c_upd");
  bool g = frag && frag->width_min.equivalent(N - M - BoundExpr(1));
  o.pass = w && a && g;
  d << "mgs width " << (mgs && mgs->width ? mgs->width->normalized_string() : "none") << ", hh_a2v width_min "
    << (a2v ? a2v->width_min.normalized_string() : "none") << ", gehd2 fragment width_min "
    << (frag ? frag->width_min.normalized_string() : "none");
  o.detail = d.str();
  return o;
}

Outcome improvement() {
  Outcome o;
  std::ostringstream d;
  Binding b{{"M", 64}, {"N", 32}, {"S", 64}};
  for (const char* k : {"mgs", "hh_a2v", "hh_v2q"}) {
    auto dv = derive(builtin_kernel(k));
    auto h = best_hourglass(dv, b, "SU");
    auto c = best_classical(dv, b);
    bool ok = h.bound && c.bound && h.value.enclosure.lo > c.value.enclosure.hi;
    o.pass &= ok;
    d << k << " " << (h.bound ? dec(h.value.enclosure.lo) : "n/a") << " > " << (c.bound ? dec(c.value.enclosure.hi) : "n/a")
      << "; ";
  }
  auto dv = derive(builtin_kernel("gehd2"));
  Binding gb{{"N", 32}, {"S", 64}};
  auto h = best_hourglass(dv, gb);
  auto c = best_classical(dv, gb);
  d << "gehd2 (informational) " << (h.bound ? dec(h.value.enclosure.lo) : "n/a") << " vs "
    << (c.bound ? dec(c.value.enclosure.hi) : "n/a");
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"symbolic reproduction", symbolic_reproduction},
      {"soundness sweep", soundness},
      {"upper-bound match", upper_bound_match},
      {"tightness", tightness},
      {"sampling oracle", sampling_oracle},
      {"Brascamp-Lieb certificate", brascamp_lieb},
      {"detection regression", detection},
      {"improvement over classical", improvement},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failed;
    std::printf("criterion %zu %s: %s (%.2fs) %s\n", i + 1, criteria[i].first, r.pass ? "PASS" : "FAIL", secs,
                r.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
