#include "iolb/pebble.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace iolb {

std::string to_string(Policy p) { return p == Policy::lru ? "lru" : "belady"; }

Policy parse_policy(std::string_view name) {
  if (name == "lru") return Policy::lru;
  if (name == "belady") return Policy::belady;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::size_t max_in_degree(const Cdag& g) {
  std::size_t d = 0;
  for (NodeId v = 0; v < g.size(); ++v) d = std::max(d, g.predecessors(v).size());
  return d;
}

namespace {

constexpr std::uint64_t never = std::numeric_limits<std::uint64_t>::max();

class Cache {
 public:
  Cache(const Cdag& g, std::span<const NodeId> schedule, std::size_t S, Policy policy)
      : g_(g), S_(S), policy_(policy), red_(g.size(), 0), key_(g.size(), 0), pinned_(g.size(), 0),
        stored_(g.size(), 0), next_(g.size(), 0) {
    uses_offset_.assign(g.size() + 1, 0);
    for (NodeId v : schedule)
      for (NodeId p : g.predecessors(v)) ++uses_offset_[p + 1];
    for (std::size_t i = 0; i < g.size(); ++i) uses_offset_[i + 1] += uses_offset_[i];
    uses_.resize(uses_offset_.back());
    std::vector<std::uint32_t> fill(uses_offset_.begin(), uses_offset_.end() - 1);
    for (std::size_t t = 0; t < schedule.size(); ++t)
      for (NodeId p : g.predecessors(schedule[t])) uses_[fill[p]++] = static_cast<std::uint32_t>(t);
  }

  PebbleTrace trace;

  void step(std::size_t t, NodeId v) {
    auto preds = g_.predecessors(v);
    for (NodeId p : preds) pinned_[p] = 1;
    for (NodeId p : preds) {
      if (red_[p]) continue;
      ++trace.loads;
      if (!trace.loads_per_node.empty()) ++trace.loads_per_node[p];
      place(p);
    }
    for (NodeId p : preds) {
      advance(p, t);
      reindex(p);
    }
    place(v);
    reindex(v);
    for (NodeId p : preds) pinned_[p] = 0;
  }

 private:
  std::uint64_t next_use(NodeId v) const {
    std::uint32_t i = uses_offset_[v] + next_[v];
    return i < uses_offset_[v + 1] ? uses_[i] : never;
  }

  void advance(NodeId v, std::size_t t) {
    while (uses_offset_[v] + next_[v] < uses_offset_[v + 1] && uses_[uses_offset_[v] + next_[v]] <= t) ++next_[v];
  }

  std::uint64_t key_for(NodeId v) {
    if (policy_ == Policy::lru) return ++clock_;
    return never - next_use(v);
  }

  void reindex(NodeId v) {
    order_.erase({key_[v], v});
    key_[v] = key_for(v);
    order_.insert({key_[v], v});
  }

  void place(NodeId v) {
    if (red_[v]) return;
    if (order_.size() == S_) evict();
    red_[v] = 1;
    key_[v] = key_for(v);
    order_.insert({key_[v], v});
    trace.peak_red = std::max(trace.peak_red, order_.size());
  }

  void evict() {
    for (auto it = order_.begin(); it != order_.end(); ++it) {
      NodeId u = it->second;
      if (pinned_[u]) continue;
      order_.erase(it);
      red_[u] = 0;
      if (!g_.is_input(u) && !stored_[u] && (g_.is_output(u) || still_needed(u))) {
        stored_[u] = 1;
        ++trace.stores;
      }
      return;
    }
    throw PebbleError("no evictable red pebble");
  }

  bool still_needed(NodeId u) const { return next_use(u) != never; }

  const Cdag& g_;
  std::size_t S_;
  Policy policy_;
  std::vector<std::uint8_t> red_;
  std::vector<std::uint64_t> key_;
  std::vector<std::uint8_t> pinned_;
  std::vector<std::uint8_t> stored_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> uses_offset_;
  std::vector<std::uint32_t> uses_;
  std::set<std::pair<std::uint64_t, NodeId>> order_;
  std::uint64_t clock_ = 0;
};

}  // namespace

PebbleTrace run(const Cdag& g, std::span<const NodeId> schedule, std::size_t S, Policy policy, bool per_node_loads) {
  if (!is_valid_schedule(g, schedule)) throw PebbleError("schedule is not a valid topological order");
  std::size_t need = 0;
  for (NodeId v : schedule) need = std::max(need, g.predecessors(v).size() + 1);
  if (S < need) throw PebbleError("S = " + std::to_string(S) + " cannot hold a step needing " + std::to_string(need));
  Cache cache(g, schedule, S, policy);
  cache.trace.S = S;
  cache.trace.policy = policy;
  if (per_node_loads) cache.trace.loads_per_node.assign(g.size(), 0);
  for (std::size_t t = 0; t < schedule.size(); ++t) cache.step(t, schedule[t]);
  return std::move(cache.trace);
}

std::uint64_t min_loads_for_schedule(const Cdag& g, std::span<const NodeId> schedule, std::size_t S) {
  return run(g, schedule, S, Policy::belady).loads;
}

}  // namespace iolb
