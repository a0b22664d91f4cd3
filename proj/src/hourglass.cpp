#include "iolb/hourglass.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace iolb {

namespace {

using Tuple = std::vector<std::int64_t>;

struct Partition {
  std::vector<std::size_t> temporal, broadcast, neutral;
};

BoundExpr to_bound(const AffineExpr& e) {
  std::vector<BoundExpr> terms{BoundExpr(Rational(e.constant()))};
  for (const auto& [name, c] : e.terms()) terms.push_back(BoundExpr(Rational(c)) * BoundExpr::param(name));
  return BoundExpr::sum(std::move(terms));
}

// Instances of one statement grouped by (temporal, neutral) coordinates.
struct Slices {
  std::map<std::pair<Tuple, Tuple>, std::vector<NodeId>> groups;
  std::vector<Tuple> temporal_order;  // distinct temporal tuples in program order
  std::map<Tuple, std::size_t> temporal_rank;

  const std::vector<NodeId>* get(const Tuple& k, const Tuple& j) const {
    auto it = groups.find({k, j});
    return it == groups.end() ? nullptr : &it->second;
  }
  std::optional<Tuple> next(const Tuple& k, std::size_t steps = 1) const {
    std::size_t r = temporal_rank.at(k) + steps;
    if (r >= temporal_order.size()) return std::nullopt;
    return temporal_order[r];
  }
};

Slices build_slices(const Cdag& g, int stmt, const Partition& p) {
  Slices s;
  for (NodeId v : g.instances_of(stmt)) {
    auto c = g.coordinates(v);
    Tuple k, j;
    for (auto d : p.temporal) k.push_back(c[d]);
    for (auto d : p.neutral) j.push_back(c[d]);
    if (s.temporal_rank.emplace(k, s.temporal_order.size()).second) s.temporal_order.push_back(k);
    s.groups[{k, j}].push_back(v);
  }
  return s;
}

class Reach {
 public:
  explicit Reach(const Cdag& g) : g_(g), mark_(g.size(), 0) {}

  // Marks everything reachable from `sources` (forward) within ids <= limit.
  void forward(std::span<const NodeId> sources, NodeId limit) { sweep(sources, limit, true); }
  // Marks everything that reaches `sinks` within ids >= limit.
  void backward(std::span<const NodeId> sinks, NodeId limit) { sweep(sinks, limit, false); }
  bool marked(NodeId v) const { return mark_[v] == stamp_; }
  std::uint32_t stamp() const { return stamp_; }
  std::vector<std::uint32_t> snapshot() const { return mark_; }

 private:
  void sweep(std::span<const NodeId> seeds, NodeId limit, bool fwd) {
    ++stamp_;
    queue_.clear();
    for (NodeId v : seeds)
      if (mark_[v] != stamp_) {
        mark_[v] = stamp_;
        queue_.push_back(v);
      }
    for (std::size_t h = 0; h < queue_.size(); ++h) {
      NodeId v = queue_[h];
      auto next = fwd ? g_.successors(v) : g_.predecessors(v);
      for (NodeId w : next) {
        if (fwd ? w > limit : w < limit) continue;
        if (mark_[w] == stamp_) continue;
        mark_[w] = stamp_;
        queue_.push_back(w);
      }
    }
  }

  const Cdag& g_;
  std::vector<std::uint32_t> mark_;
  std::vector<NodeId> queue_;
  std::uint32_t stamp_ = 0;
};

// Every source of every slice reaches every instance of the successor slice.
bool chains_hold(const Slices& s, Reach& reach) {
  std::size_t checked = 0;
  for (const auto& [key, sources] : s.groups) {
    auto nk = s.next(key.first);
    if (!nk) continue;
    const auto* targets = s.get(*nk, key.second);
    if (!targets) continue;
    NodeId limit = *std::max_element(targets->begin(), targets->end());
    for (NodeId src : sources) {
      reach.forward(std::span<const NodeId>(&src, 1), limit);
      for (NodeId t : *targets)
        if (!reach.marked(t)) return false;
      ++checked;
    }
  }
  return checked > 0;
}

struct Sample {
  std::vector<Rational> row;  // 1, parameters..., temporal values...
  Rational value;
};

std::optional<std::vector<Rational>> exact_fit(const std::vector<Sample>& samples) {
  if (samples.empty()) return std::nullopt;
  const std::size_t u = samples[0].row.size();
  std::vector<std::vector<Rational>> m;
  for (const auto& s : samples) {
    auto r = s.row;
    r.push_back(s.value);
    m.push_back(std::move(r));
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < u && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && m[p][col] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    Rational inv = Rational(1) / m[row][col];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t c = col; c <= u; ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < m.size(); ++r)
    if (m[r][u] != 0) return std::nullopt;
  std::vector<Rational> coeff(u, Rational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) coeff[pivots[r]] = m[r][u];
  return coeff;
}

bool fits(const std::vector<Rational>& coeff, const std::vector<Sample>& samples) {
  for (const auto& s : samples) {
    Rational v = 0;
    for (std::size_t i = 0; i < coeff.size(); ++i) v += coeff[i] * s.row[i];
    if (v != s.value) return false;
  }
  return true;
}

std::optional<AffineExpr> to_affine(const std::vector<Rational>& coeff, const std::vector<std::string>& names) {
  for (const auto& c : coeff)
    if (!is_integer(c)) return std::nullopt;
  AffineExpr e(numerator_of(coeff[0]).convert_to<std::int64_t>());
  for (std::size_t i = 0; i < names.size(); ++i)
    e = e + AffineExpr::symbol(names[i], numerator_of(coeff[i + 1]).convert_to<std::int64_t>());
  return e;
}

std::vector<std::string> fit_parameters(const AffineKernel& kernel) {
  std::vector<std::string> out;
  for (const auto& p : kernel.parameters())
    if (p.role == ParamRole::problem_size || p.role == ParamRole::split) out.push_back(p.name);
  return out;
}

std::vector<Rational> base_row(const std::vector<std::string>& params, const Binding& b, const Tuple& k) {
  std::vector<Rational> row{Rational(1)};
  for (const auto& p : params) row.emplace_back(b.at(p));
  for (auto v : k) row.emplace_back(v);
  return row;
}

// Largest value of e over the loops of `domain` (substituting outer indices by their extremes).
AffineExpr maximize(AffineExpr e, const IterationDomain& domain, bool maximum) {
  for (std::size_t d = domain.depth(); d-- > 0;) {
    const Loop& l = domain.loops[d];
    std::int64_t c = e.coefficient(l.index);
    if (c == 0) continue;
    bool take_upper = (c > 0) == maximum;
    e = e.substitute(l.index, take_upper ? l.upper - 1 : l.lower);
  }
  return e;
}

struct Candidate {
  Partition partition;
  AffineExpr step_width;
};

bool at_step(const Cdag& g, NodeId v, const std::vector<int>& loop_ids, const Tuple& k) {
  int s = g.statement_of(v);
  if (s < 0) return false;
  const auto& loops = g.kernel().statements()[static_cast<std::size_t>(s)].domain.loops;
  if (loops.size() < loop_ids.size()) return false;
  auto c = g.coordinates(v);
  for (std::size_t d = 0; d < loop_ids.size(); ++d)
    if (loops[d].id != loop_ids[d] || c[d] != k[d]) return false;
  return true;
}

std::vector<Sample> step_width_samples(const Cdag& g, const Slices& s, const Partition& p,
                                       const std::vector<std::string>& params) {
  std::map<Tuple, std::int64_t> best;
  for (const auto& [key, nodes] : s.groups) {
    std::set<Tuple> distinct;
    for (NodeId v : nodes) {
      auto c = g.coordinates(v);
      Tuple t;
      for (auto d : p.broadcast) t.push_back(c[d]);
      distinct.insert(t);
    }
    auto n = static_cast<std::int64_t>(distinct.size());
    auto [it, inserted] = best.emplace(key.first, n);
    if (!inserted) it->second = std::min(it->second, n);
  }
  std::vector<Sample> out;
  for (const auto& [k, n] : best) out.push_back({base_row(params, g.binding(), k), Rational(n)});
  return out;
}

std::vector<Sample> chain_width_samples(const Cdag& g, const Slices& s, const std::vector<int>& loop_ids,
                                        const std::vector<std::string>& params, Reach& reach) {
  std::map<Tuple, std::int64_t> best;
  std::vector<std::uint32_t> forward;
  for (const auto& [key, sources] : s.groups) {
    auto k1 = s.next(key.first), k2 = s.next(key.first, 2);
    if (!k1 || !k2) continue;
    if (!s.get(*k1, key.second)) continue;
    const auto* sinks = s.get(*k2, key.second);
    if (!sinks) continue;
    NodeId hi = *std::max_element(sinks->begin(), sinks->end());
    NodeId lo = *std::min_element(sources.begin(), sources.end());
    reach.forward(sources, hi);
    forward = reach.snapshot();
    std::uint32_t fstamp = reach.stamp();
    reach.backward(*sinks, lo);
    std::int64_t count = 0;
    for (NodeId v = lo; v <= hi; ++v)
      if (forward[v] == fstamp && reach.marked(v) && at_step(g, v, loop_ids, *k1)) ++count;
    auto [it, inserted] = best.emplace(key.first, count);
    if (!inserted) it->second = std::min(it->second, count);
  }
  std::vector<Sample> out;
  for (const auto& [k, n] : best) out.push_back({base_row(params, g.binding(), k), Rational(n)});
  return out;
}

std::vector<Partition> candidate_partitions(std::size_t depth) {
  std::vector<Partition> out;
  for (std::size_t t = 1; t < depth; ++t) {
    std::size_t rest = depth - t;
    std::vector<std::vector<std::size_t>> subsets;
    for (std::uint32_t mask = 1; mask < (1u << rest); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t b = 0; b < rest; ++b)
        if (mask & (1u << b)) s.push_back(t + b);
      subsets.push_back(s);
    }
    std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a < b;
    });
    for (const auto& I : subsets) {
      Partition p;
      for (std::size_t d = 0; d < t; ++d) p.temporal.push_back(d);
      p.broadcast = I;
      for (std::size_t d = t; d < depth; ++d)
        if (std::find(I.begin(), I.end(), d) == I.end()) p.neutral.push_back(d);
      out.push_back(p);
    }
  }
  return out;
}

std::optional<HourglassReport> detect_on(const AffineKernel& kernel, int stmt, const std::vector<Cdag>& fit,
                                         const Cdag& held) {
  const Statement& st = kernel.statements()[static_cast<std::size_t>(stmt)];
  const auto& dom = st.domain;
  if (dom.depth() < 2) return std::nullopt;
  const auto params = fit_parameters(kernel);

  std::optional<Candidate> chosen;
  Reach reach0(fit[0]);
  for (const auto& p : candidate_partitions(dom.depth())) {
    Slices s0 = build_slices(fit[0], stmt, p);
    if (!chains_hold(s0, reach0)) continue;
    std::vector<Sample> samples;
    for (const auto& g : fit) {
      auto more = step_width_samples(g, build_slices(g, stmt, p), p, params);
      samples.insert(samples.end(), more.begin(), more.end());
    }
    auto coeff = exact_fit(samples);
    if (!coeff || !fits(*coeff, step_width_samples(held, build_slices(held, stmt, p), p, params))) continue;
    std::vector<std::string> names = params;
    for (auto d : p.temporal) names.push_back(dom.loops[d].index);
    auto w = to_affine(*coeff, names);
    if (!w) continue;
    bool parametric = std::any_of(params.begin(), params.end(), [&](const auto& n) { return w->references(n); });
    if (!parametric) continue;
    chosen = Candidate{p, *w};
    break;
  }
  if (!chosen) return std::nullopt;
  const Partition& p = chosen->partition;

  HourglassReport r;
  r.statement = st.label;
  for (auto d : p.temporal) r.temporal.push_back(dom.loops[d].index);
  for (auto d : p.broadcast) r.broadcast.push_back(dom.loops[d].index);
  for (auto d : p.neutral) r.neutral.push_back(dom.loops[d].index);
  r.step_width = to_bound(chosen->step_width);

  AffineExpr wmin = chosen->step_width;
  for (std::size_t t = p.temporal.size(); t-- > 0;) {
    const Loop& l = dom.loops[p.temporal[t]];
    std::int64_t c = wmin.coefficient(l.index);
    if (c > 0) wmin = wmin.substitute(l.index, l.lower);
    if (c < 0) wmin = wmin.substitute(l.index, l.upper - 1);
  }
  r.width_min = to_bound(wmin);

  for (std::size_t d = 0; d < dom.depth(); ++d) {
    const Loop& l = dom.loops[d];
    AffineExpr upper = maximize(l.upper, dom, true);
    bool lower_fixed = std::none_of(dom.loops.begin(), dom.loops.end(),
                                    [&](const Loop& o) { return l.lower.references(o.index); });
    r.extents.emplace(l.index, to_bound(lower_fixed ? upper - l.lower : upper));
  }

  std::vector<int> loop_ids;
  for (auto d : p.temporal) loop_ids.push_back(dom.loops[d].id);
  std::vector<Sample> samples;
  for (const auto& g : fit) {
    Reach reach(g);
    auto more = chain_width_samples(g, build_slices(g, stmt, p), loop_ids, params, reach);
    samples.insert(samples.end(), more.begin(), more.end());
  }
  Reach reach_held(held);
  auto held_samples = chain_width_samples(held, build_slices(held, stmt, p), loop_ids, params, reach_held);
  if (auto coeff = exact_fit(samples); coeff && !held_samples.empty() && fits(*coeff, held_samples)) {
    std::vector<std::string> names = params;
    for (auto d : p.temporal) names.push_back(dom.loops[d].index);
    if (auto w = to_affine(*coeff, names)) r.width = to_bound(*w);
  }
  return r;
}

struct Instantiated {
  std::vector<Cdag> fit;
  Cdag held;
};

Instantiated instantiate_all(const AffineKernel& kernel, const DetectOptions& options) {
  if (options.fit.size() < 3) throw KernelError("hourglass detection needs at least three fit bindings");
  Instantiated out{{}, Cdag::instantiate(kernel, options.held_out)};
  for (const auto& b : options.fit) out.fit.push_back(Cdag::instantiate(kernel, b));
  return out;
}

}  // namespace

DetectOptions default_detect_options(const AffineKernel& kernel) {
  static const std::int64_t seeds[4][2] = {{7, 4}, {9, 5}, {11, 4}, {13, 7}};
  bool has_m = std::any_of(kernel.parameters().begin(), kernel.parameters().end(), [](const Parameter& p) {
    return p.name == "M" && p.role == ParamRole::problem_size;
  });
  auto make = [&](const std::int64_t* s) {
    Binding b;
    for (const auto& p : kernel.parameters()) {
      if (p.role == ParamRole::split)
        b[p.name] = s[1] - 1;
      else if (p.role == ParamRole::problem_size)
        b[p.name] = (p.name == "N" && has_m) ? s[1] : s[0];
    }
    return b;
  };
  DetectOptions o;
  for (int i = 0; i < 3; ++i) o.fit.push_back(make(seeds[i]));
  o.held_out = make(seeds[3]);
  return o;
}

std::optional<HourglassReport> detect(const AffineKernel& kernel, std::string_view statement,
                                      const DetectOptions& options) {
  int stmt = kernel.statement_index(statement);
  auto g = instantiate_all(kernel, options);
  return detect_on(kernel, stmt, g.fit, g.held);
}

std::optional<HourglassReport> detect(const AffineKernel& kernel, std::string_view statement) {
  return detect(kernel, statement, default_detect_options(kernel));
}

std::vector<HourglassReport> detect_all(const AffineKernel& kernel) {
  auto g = instantiate_all(kernel, default_detect_options(kernel));
  std::vector<HourglassReport> out;
  for (std::size_t s = 0; s < kernel.statements().size(); ++s)
    if (auto r = detect_on(kernel, static_cast<int>(s), g.fit, g.held)) out.push_back(std::move(*r));
  return out;
}

std::pair<AffineKernel, AffineKernel> split_temporal(const AffineKernel& kernel, std::string_view statement,
                                                     const std::string& split) {
  auto report = detect(kernel, statement);
  if (!report) throw KernelError("statement '" + std::string(statement) + "' has no hourglass pattern");
  if (!report->split_recommended())
    throw KernelError("split not applicable: width_min = " + report->width_min.to_string() +
                      " is already parametric");
  const Statement& st = kernel.statement(statement);
  const Loop& outer = st.domain.loops.front();
  if (kernel.body().size() != 1 || kernel.body().front().loop != outer.id)
    throw KernelError("split requires the temporal loop to enclose the whole kernel");
  Parameter p{split, ParamRole::split};
  AffineExpr at = AffineExpr::symbol(split);
  return {kernel.with_loop_range(outer.id, outer.lower, at, p, kernel.name() + "_lo"),
          kernel.with_loop_range(outer.id, at, outer.upper, p, kernel.name() + "_hi")};
}

ChainCheck check_chains(const Cdag& g, const HourglassReport& report, std::size_t max_pairs, std::uint64_t seed) {
  const AffineKernel& kernel = g.kernel();
  int stmt = kernel.statement_index(report.statement);
  const auto& dom = kernel.statements()[static_cast<std::size_t>(stmt)].domain;
  Partition p;
  for (const auto& n : report.temporal) p.temporal.push_back(static_cast<std::size_t>(dom.position(n)));
  for (const auto& n : report.broadcast) p.broadcast.push_back(static_cast<std::size_t>(dom.position(n)));
  for (const auto& n : report.neutral) p.neutral.push_back(static_cast<std::size_t>(dom.position(n)));
  Slices s = build_slices(g, stmt, p);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& [key, sources] : s.groups) {
    auto nk = s.next(key.first);
    if (!nk) continue;
    const auto* targets = s.get(*nk, key.second);
    if (!targets) continue;
    for (NodeId a : sources)
      for (NodeId b : *targets) pairs.emplace_back(a, b);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  if (pairs.size() > max_pairs) pairs.resize(max_pairs);
  ChainCheck out;
  Reach reach(g);
  for (auto [a, b] : pairs) {
    reach.forward(std::span<const NodeId>(&a, 1), b);
    ++out.pairs_checked;
    if (!reach.marked(b)) ++out.pairs_failed;
  }
  return out;
}

}  // namespace iolb
