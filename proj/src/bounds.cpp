#include "iolb/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace iolb {

namespace {

BoundExpr P(const char* name) { return BoundExpr::param(name); }
BoundExpr Q(long n, long d = 1) { return BoundExpr(Rational(n, d)); }

Poly poly_of(const AffineExpr& e) {
  Poly p(static_cast<long>(e.constant()));
  for (const auto& [name, c] : e.terms()) p += Poly(static_cast<long>(c)) * Poly::variable(name);
  return p;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Objective weight log2(cap) at the comparison point, rounded to 1/1024.
Rational weight(const BoundExpr& cap, const Valuation& point) {
  double v = to_double(enclose(cap, point, 32).lo);
  if (!(v > 1)) return 0;
  return Rational(static_cast<long>(std::llround(std::log2(v) * 1024)), 1024);
}

std::vector<Rational> weights(const std::vector<Projection>& ps, const Valuation& point) {
  std::vector<Rational> w;
  for (const auto& p : ps) w.push_back(weight(p.cap, point));
  return w;
}

BoundExpr extent_product(const HourglassReport& r, const std::vector<std::string>& dims) {
  std::vector<BoundExpr> f;
  for (const auto& d : dims) f.push_back(r.extents.at(d));
  return BoundExpr::product(std::move(f));
}

Valuation with_k(Valuation v) {
  v["K"] = 2 * v.at("S");
  return v;
}

Valuation kernel_point(const AffineKernel& kernel) {
  Valuation v = regime_point();
  for (const auto& p : kernel.parameters())
    if (p.role == ParamRole::split) v[p.name] = v.at("N") / 2;
  return v;
}

Valuation point_for(const std::string& split) {
  Valuation v = regime_point();
  if (!split.empty()) v[split] = v.at("N") / 2;
  return v;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::classical: return "classical";
    case Regime::general: return "general";
    case Regime::small_cache: return "small-cache";
  }
  return "?";
}

std::string to_string(Convention c) { return c == Convention::proof ? "proof" : "table"; }

Valuation regime_point() {
  return {{"M", Rational(1 << 20)}, {"N", Rational(1 << 19)}, {"S", Rational(1 << 24)}, {"K", Rational(1 << 25)}};
}

std::vector<Projection> inset_projections(const AffineKernel& kernel, std::string_view statement) {
  const Statement& st = kernel.statement(statement);
  auto indices = st.domain.indices();
  std::vector<Projection> out;
  std::vector<std::vector<std::string>> seen;
  for (const auto& access : st.reads) {
    std::vector<std::string> kept;
    for (const auto& sub : access.subscripts)
      for (const auto& idx : indices)
        if (sub.references(idx) && !contains(kept, idx)) kept.push_back(idx);
    if (kept.empty()) continue;
    auto key = sorted(kept);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.push_back({kept, P("K"), ProjectionOrigin::inset_path});
  }
  return out;
}

Poly instance_count(const AffineKernel& kernel, std::string_view statement, bool skip_first_step) {
  const auto& loops = kernel.statement(statement).domain.loops;
  Poly p(1);
  for (std::size_t d = loops.size(); d-- > 0;) {
    Poly lower = poly_of(loops[d].lower);
    if (d == 0 && skip_first_step) lower += Poly(1);
    p = sum_over(p, loops[d].index, lower, poly_of(loops[d].upper));
  }
  return p;
}

DerivedBound classical_bound(const AffineKernel& kernel, std::string_view statement, const BoundExpr& node_count) {
  const Statement& st = kernel.statement(statement);
  auto projections = inset_projections(kernel, statement);
  auto cert = bl_exponents(st.domain.indices(), projections);
  BoundExpr K = Q(2) * P("S");
  DerivedBound b;
  b.kernel = kernel.name();
  b.statement = st.label;
  b.regime = Regime::classical;
  b.K = K;
  b.emax = BoundExpr::power(K, cert.total());
  b.node_count = node_count;
  b.q = (K - P("S")) * node_count / b.emax;
  return b;
}

namespace {

BoundExpr iprime(const HourglassReport& r, const std::vector<std::string>& dims,
                 const std::vector<Projection>& projections, Convention convention, const Valuation& point) {
  const BoundExpr& W = r.width_min;
  std::vector<Projection> mod;
  mod.push_back({r.broadcast, convention == Convention::proof ? extent_product(r, r.broadcast) : W,
                 ProjectionOrigin::hourglass_width});
  auto add = [&](Projection p) {
    for (auto& q : mod)
      if (sorted(q.kept) == sorted(p.kept)) {
        if (p.origin == ProjectionOrigin::width_ratio && q.origin == ProjectionOrigin::inset_path) q = p;
        return;
      }
    mod.push_back(std::move(p));
  };
  for (const auto& p : projections) {
    std::vector<std::string> x;
    bool touches = false;
    for (const auto& d : p.kept) {
      if (contains(r.broadcast, d))
        touches = true;
      else
        x.push_back(d);
    }
    if (!touches) {
      add(p);
    } else if (!x.empty()) {
      add({x, p.cap / W, ProjectionOrigin::width_ratio});
    }
  }
  auto cert = bl_exponents(dims, mod, weights(mod, with_k(point)));
  return bl_product(mod, cert.exponents);
}

FlatBound flat(const HourglassReport& r, const std::vector<std::string>& dims,
               const std::vector<Projection>& projections, const BoundExpr& node_count, const Valuation& point) {
  auto touches_neutral = [&](const Projection& p) {
    return std::any_of(p.kept.begin(), p.kept.end(), [&](const auto& d) { return contains(r.neutral, d); });
  };
  std::vector<Projection> others{{r.temporal, Q(2), ProjectionOrigin::flatness}};
  for (const auto& p : projections)
    if (!touches_neutral(p)) others.push_back(p);
  std::optional<FlatBound> best;
  Rational best_e;
  Valuation pk = with_k(point);
  for (const auto& w : projections) {
    if (!touches_neutral(w)) continue;
    std::vector<Projection> set{w};
    set.insert(set.end(), others.begin(), others.end());
    auto wt = weights(set, pk);
    std::vector<std::optional<Rational>> fixed(set.size());
    fixed[0] = Rational(1);
    BLCertificate cert;
    try {
      cert = bl_exponents(dims, set, wt, fixed);
    } catch (const BLInfeasible&) {
      continue;
    }
    std::vector<Projection> rest(set.begin() + 1, set.end());
    std::vector<Rational> exps(cert.exponents.begin() + 1, cert.exponents.end());
    FlatBound f;
    f.e = bl_product(rest, exps);
    std::vector<std::string> missing;
    for (const auto& d : r.neutral)
      if (!contains(w.kept, d)) missing.push_back(d);
    f.R = extent_product(r, missing);
    f.bound = f.e * f.R * P("K");
    f.w = w.kept;
    Rational ev = enclose(f.e, pk, 32).lo;
    if (!best || ev < best_e) {
      best = f;
      best_e = ev;
    }
  }
  if (best) return *best;
  FlatBound f;
  f.e = Q(1);
  f.R = Q(1);
  f.bound = node_count;
  f.fallback = true;
  return f;
}

std::vector<std::string> report_dims(const HourglassReport& r) {
  std::vector<std::string> d = r.temporal;
  d.insert(d.end(), r.broadcast.begin(), r.broadcast.end());
  d.insert(d.end(), r.neutral.begin(), r.neutral.end());
  return d;
}

std::vector<DerivedBound> hourglass_bound_at(const AffineKernel& kernel, std::string_view statement,
                                             const HourglassReport& report, const BoundExpr& node_count,
                                             Convention convention, const Valuation& point) {
  auto projections = inset_projections(kernel, statement);
  auto dims = report_dims(report);
  BoundExpr ip = iprime(report, dims, projections, convention, point);
  FlatBound f = flat(report, dims, projections, node_count, point);
  const BoundExpr S = P("S");
  const BoundExpr& W = report.width_min;

  DerivedBound g;
  g.kernel = kernel.name();
  g.statement = report.statement;
  g.convention = convention;
  g.node_count = node_count;
  g.width_min = W;
  g.regime = Regime::general;
  g.K = Q(2) * S;
  g.emax = (ip + f.bound).substitute("K", g.K);
  g.q = (g.K - S) * node_count / g.emax;
  if (f.fallback) g.notes.push_back("no projection touches the neutral dimensions; |F| bounded by the node count");
  if (projections.size() > 3) g.notes.push_back("flatness factor e from a certificate over more than three projections");

  DerivedBound s = g;
  s.regime = Regime::small_cache;
  s.K = W;
  s.emax = f.bound.substitute("K", W);
  s.q = (W - S) * node_count / s.emax;
  return {g, s};
}

}  // namespace

BoundExpr hourglass_Iprime_bound(const HourglassReport& report, const std::vector<Projection>& projections,
                                 Convention convention) {
  return iprime(report, report_dims(report), projections, convention, regime_point());
}

FlatBound hourglass_F_bound(const HourglassReport& report, const std::vector<Projection>& projections,
                            const BoundExpr& node_count) {
  return flat(report, report_dims(report), projections, node_count, regime_point());
}

std::vector<DerivedBound> hourglass_bound(const AffineKernel& kernel, std::string_view statement,
                                          const HourglassReport& report, const BoundExpr& node_count,
                                          Convention convention) {
  return hourglass_bound_at(kernel, statement, report, node_count, convention, kernel_point(kernel));
}

const DerivedBound* Derivation::find(std::string_view statement, Regime regime) const {
  const auto& list = regime == Regime::classical ? classical : hourglass;
  for (const auto& b : list)
    if (b.statement == statement && b.regime == regime) return &b;
  return nullptr;
}

Derivation derive(const AffineKernel& kernel, Convention convention) {
  Derivation d;
  d.kernel = kernel.name();
  d.convention = convention;
  d.reports = detect_all(kernel);
  const std::string split = kernel.has_parameter("M") ? "P" : "M";
  for (const auto& r : d.reports) {
    BoundExpr full = BoundExpr::from_poly(instance_count(kernel, r.statement));
    d.classical.push_back(classical_bound(kernel, r.statement, full));
    if (!r.split_recommended()) {
      BoundExpr count = convention == Convention::proof
                            ? full
                            : BoundExpr::from_poly(instance_count(kernel, r.statement, true));
      auto bs = hourglass_bound_at(kernel, r.statement, r, count, convention, point_for(""));
      d.hourglass.insert(d.hourglass.end(), bs.begin(), bs.end());
      continue;
    }
    auto [lo, hi] = split_temporal(kernel, r.statement, split);
    auto fr = detect(lo, r.statement);
    if (!fr || fr->split_recommended()) continue;
    BoundExpr count = convention == Convention::proof
                          ? BoundExpr::from_poly(instance_count(lo, r.statement))
                          : BoundExpr::from_poly(instance_count(kernel, r.statement, true));
    auto bs = hourglass_bound_at(lo, r.statement, *fr, count, convention, point_for(split));
    const Loop& outer = kernel.statement(r.statement).domain.loops.front();
    for (auto& b : bs) {
      b.kernel = kernel.name();
      b.split = split;
      b.split_lower = outer.lower + AffineExpr(1);
      b.split_upper = outer.upper;
      b.notes.push_back("temporal loop split at " + split + "; bound of the first fragment");
      d.hourglass.push_back(std::move(b));
    }
  }
  auto pick = [](const std::vector<DerivedBound>& list, Regime regime) {
    std::size_t best = 0;
    std::optional<Rational> best_v;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].regime != regime) continue;
      Rational v = enclose(list[i].q, point_for(list[i].split.value_or("")), 32).lo;
      if (!best_v || v >= *best_v) {
        best = i;
        best_v = v;
      }
    }
    return best;
  };
  d.primary = pick(d.hourglass, Regime::general);
  d.primary_classical = pick(d.classical, Regime::classical);
  return d;
}

BoundValue evaluate_bound(const DerivedBound& b, const Binding& binding) {
  BoundValue out;
  if (b.split && !binding.contains(*b.split)) {
    std::int64_t lo = 0, hi = -1;
    try {
      lo = b.split_lower.evaluate(binding);
      hi = b.split_upper.evaluate(binding);
    } catch (const std::exception& e) {
      out.reason = e.what();
      return out;
    }
    std::optional<BoundValue> best;
    for (std::int64_t m = lo; m <= hi; ++m) {
      Binding bm = binding;
      bm[*b.split] = m;
      BoundValue v = evaluate_bound(b, bm);
      if (v.applicable && (!best || v.enclosure.lo > best->enclosure.lo)) {
        v.split_value = m;
        best = v;
      }
    }
    if (best) return *best;
    out.reason = "no admissible value of the split " + *b.split;
    return out;
  }
  Valuation v = valuation_from(binding);
  try {
    if (b.width_min) {
      Rational w = evaluate(*b.width_min, v);
      if (w < 1) {
        out.reason = "width_min = " + to_string(w) + " < 1";
        return out;
      }
      if (b.regime == Regime::small_cache && v.at("S") > w) {
        out.reason = "S > width_min";
        return out;
      }
    }
    try {
      Rational q = evaluate(b.q, v);
      out.exact = q;
      out.enclosure = {q, q};
    } catch (const EvaluationError& e) {
      if (std::string_view(e.what()).rfind("irrational", 0) != 0) throw;
      out.enclosure = enclose(b.q, v);
      if (out.enclosure.is_point()) out.exact = out.enclosure.lo;
    }
  } catch (const EvaluationError& e) {
    out.reason = std::string("not applicable (") + e.what() + ")";
    return out;
  }
  out.applicable = true;
  return out;
}

namespace {

BestBound best_of(const std::vector<DerivedBound>& list, const Binding& binding, std::string_view statement = {}) {
  BestBound best;
  for (const auto& b : list) {
    if (!statement.empty() && b.statement != statement) continue;
    BoundValue v = evaluate_bound(b, binding);
    if (!v.applicable) continue;
    if (!best.bound || v.enclosure.lo > best.value.enclosure.lo) best = {&b, v};
  }
  return best;
}

}  // namespace

BestBound best_hourglass(const Derivation& d, const Binding& binding) { return best_of(d.hourglass, binding); }
BestBound best_classical(const Derivation& d, const Binding& binding) { return best_of(d.classical, binding); }
BestBound best_hourglass(const Derivation& d, const Binding& binding, std::string_view statement) {
  return best_of(d.hourglass, binding, statement);
}
BestBound best_classical(const Derivation& d, const Binding& binding, std::string_view statement) {
  return best_of(d.classical, binding, statement);
}

CatalogEntry catalog(std::string_view id) {
  const BoundExpr M = P("M"), N = P("N"), S = P("S");
  const BoundExpr rootS = BoundExpr::power(S, Rational(1, 2));
  CatalogEntry c;
  c.kernel = std::string(id);
  if (id == "mgs") {
    BoundExpr tail = Q(5) * M - M * N + (Q(7) * N - N * N) / Q(2) - S - Q(6);
    c.old_leading = (Q(2) * M + Q(3) * M * N + M * N * N) / rootS;
    c.new_leading = (N * N * M * M + Q(2) * M * M - Q(3) * N * M * M) / (Q(8) * (M + S));
    c.old_bound = c.old_leading + tail;
    c.new_bound = c.new_leading + tail;
    c.upper = Q(1, 2) * M * M * N * N / S;
  } else if (id == "hh_a2v") {
    BoundExpr tail = Q(5) * M - M * N + Q(5) * N - S - Q(13);
    c.old_leading = (Q(3) * M * N * N + Q(6) * M + Q(7) * N - N * N * N - Q(9) * M * N - Q(6)) / (Q(3) * rootS);
    c.new_leading = (Q(3) * M * N * N - Q(9) * M * N + Q(7) * N + Q(6) * M - Q(6) - N * N * N) /
                    (Q(24) * (Q(1) - S / (N - M)));
    c.old_bound = c.old_leading + tail;
    c.new_bound = c.new_leading + tail;
    c.upper = Q(1, 2) * (M * M * N * N - M * N * N * N / Q(3)) / S;
  } else if (id == "hh_v2q") {
    BoundExpr poly = Q(3) * M * N * N - N * N * N + Q(6) * M + Q(7) * N - Q(9) * M * N - Q(6);
    BoundExpr tail = Q(2) * M + Q(2) * N + (N - N * N) / Q(2) - S - Q(4);
    c.old_leading = poly / (Q(3) * rootS);
    c.new_leading = poly / (Q(24) * (Q(1) + S / (M - N)));
    c.old_bound = c.old_leading + tail;
    c.new_bound = c.new_leading + tail;
  } else if (id == "gebd2") {
    c.old_leading = (Q(3) * M * N * N - N * N * N - Q(9) * M * N + Q(6) * M + Q(7) * N - Q(6)) / (Q(3) * rootS);
    c.new_leading = (Q(3) * M * N * N - N * N * N + Q(3) * N * N - Q(15) * M * N + Q(4) * N + Q(18) * M - Q(12)) /
                    (Q(24) * (Q(1) + S / (Q(1) + M - N)));
    c.old_bound = c.old_leading + Q(5) * N + Q(5) * M - M * N - S - Q(13);
    c.new_bound = c.new_leading + Q(5) * N + Q(7) * M - M * N - S - Q(18);
  } else if (id == "gehd2") {
    c.old_leading = (Q(5) * N * N * N - Q(30) * N * N + Q(55) * N - Q(30)) / (Q(3) * rootS);
    c.new_leading = (N * N * N - Q(6) * N * N + Q(11) * N - Q(6)) / (Q(12) * (Q(1) + S / (N - M - Q(1))));
    c.old_bound = c.old_leading + (Q(69) * N - Q(9) * N * N) / Q(2) - Q(3) * S - Q(56);
    c.new_bound = c.new_leading - N * N + Q(12) * N - S - Q(19);
  } else {
    throw KernelError("no catalog entry for '" + std::string(id) + "'");
  }
  return c;
}

std::vector<std::string> catalog_names() { return {"mgs", "hh_a2v", "hh_v2q", "gebd2", "gehd2"}; }

}  // namespace iolb
