#include "iolb/sampling.hpp"

#include "iolb/bounds.hpp"
#include "iolb/hourglass.hpp"

#include <algorithm>

namespace iolb {

ConvexSampler::ConvexSampler(const Cdag& g)
    : g_(g),
      member_(g.size(), 0),
      desc_(g.size(), 0),
      anc_(g.size(), 0),
      in_inset_(g.size(), 0),
      frontier_(g.size(), 0),
      seen_(g.size(), 0) {}

void ConvexSampler::reset() {
  ++epoch_;
  members_.clear();
  candidates_.clear();
  inset_size_ = 0;
}

bool ConvexSampler::keeps_convex(NodeId v) const {
  for (NodeId p : g_.predecessors(v))
    if (member_[p] != epoch_ && desc_[p] == epoch_) return false;
  for (NodeId s : g_.successors(v))
    if (member_[s] != epoch_ && anc_[s] == epoch_) return false;
  return true;
}

std::size_t ConvexSampler::inset_after(NodeId v) {
  ++probe_;
  std::size_t size = inset_size_ - (in_inset_[v] == epoch_ ? 1 : 0);
  for (NodeId p : g_.predecessors(v)) {
    if (member_[p] == epoch_ || in_inset_[p] == epoch_ || seen_[p] == probe_) continue;
    seen_[p] = probe_;
    ++size;
  }
  return size;
}

void ConvexSampler::add(NodeId v) {
  member_[v] = epoch_;
  members_.push_back(v);
  if (in_inset_[v] == epoch_) {
    in_inset_[v] = 0;
    --inset_size_;
  }
  for (NodeId p : g_.predecessors(v)) {
    if (member_[p] == epoch_ || in_inset_[p] == epoch_) continue;
    in_inset_[p] = epoch_;
    ++inset_size_;
  }

  auto mark = [&](std::vector<std::uint32_t>& flag, auto next) {
    stack_.assign(1, v);
    while (!stack_.empty()) {
      NodeId u = stack_.back();
      stack_.pop_back();
      for (NodeId w : next(u)) {
        if (flag[w] == epoch_) continue;
        flag[w] = epoch_;
        stack_.push_back(w);
      }
    }
  };
  mark(desc_, [&](NodeId u) { return g_.successors(u); });
  mark(anc_, [&](NodeId u) { return g_.predecessors(u); });

  auto offer = [&](NodeId w) {
    if (g_.is_input(w) || member_[w] == epoch_ || frontier_[w] == epoch_) return;
    frontier_[w] = epoch_;
    candidates_.push_back(w);
  };
  for (NodeId p : g_.predecessors(v)) offer(p);
  for (NodeId s : g_.successors(v)) offer(s);
}

std::vector<NodeId> ConvexSampler::grow(NodeId seed_node, std::size_t K, std::mt19937_64& rng) {
  if (seed_node >= g_.size() || g_.is_input(seed_node))
    throw CdagError("convex sets are grown from computation nodes");
  reset();
  add(seed_node);
  for (;;) {
    std::erase_if(candidates_, [&](NodeId w) { return member_[w] == epoch_; });
    std::shuffle(candidates_.begin(), candidates_.end(), rng);
    auto pick = std::find_if(candidates_.begin(), candidates_.end(),
                             [&](NodeId w) { return inset_after(w) <= K && keeps_convex(w); });
    if (pick == candidates_.end()) break;
    add(*pick);
  }
  std::vector<NodeId> out = members_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> ConvexSampler::sample(std::size_t K, std::mt19937_64& rng) {
  if (g_.computation_count() == 0) return {};
  std::uniform_int_distribution<std::size_t> pick(g_.input_count(), g_.size() - 1);
  return grow(static_cast<NodeId>(pick(rng)), K, rng);
}

SamplingReport verify_sampling(const AffineKernel& kernel, const Binding& binding, std::size_t K,
                               std::size_t samples, std::uint64_t seed) {
  Cdag g = Cdag::instantiate(kernel, binding, sampling_node_ceiling);

  SamplingReport r;
  r.kernel = kernel.name();
  r.binding = binding;
  r.K = K;
  r.samples = samples;

  Derivation d = derive(kernel);
  r.statement = d.primary_bound().statement;
  auto reports = detect_all(kernel);
  auto report = std::find_if(reports.begin(), reports.end(),
                             [&](const HourglassReport& h) { return h.statement == r.statement; });
  if (report == reports.end()) throw KernelError("no hourglass report for " + r.statement);
  Rational w = evaluate(report->width_min, valuation_from(binding));
  if (w < 1) throw KernelError("hourglass width below 1 at this binding");
  r.W = static_cast<std::int64_t>(floor_of(w));
  Rational k(static_cast<std::int64_t>(K));
  r.bound = k * k / w + 2 * k;

  const int sx = kernel.statement_index(r.statement);
  ConvexSampler sampler(g);
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < samples; ++n) {
    auto E = sampler.sample(K, rng);
    std::size_t count = std::count_if(E.begin(), E.end(), [&](NodeId v) { return g.statement_of(v) == sx; });
    r.max_count = std::max(r.max_count, count);
    r.max_total = std::max(r.max_total, E.size());
    if (Rational(static_cast<std::int64_t>(count)) > r.bound) ++r.violations;
  }
  r.max_ratio = Rational(static_cast<std::int64_t>(r.max_count)) / r.bound;
  return r;
}

}  // namespace iolb
