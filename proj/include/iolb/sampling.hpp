#pragma once

#include "iolb/cdag.hpp"
#include "iolb/kernel.hpp"
#include "iolb/rational.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace iolb {

inline constexpr std::size_t sampling_node_ceiling = 50'000;

// Grows random convex sets of computation nodes with |inset| <= K. Convexity is kept
// incrementally: a candidate is rejected when one of its outside predecessors descends from
// the set or one of its outside successors is an ancestor of it.
class ConvexSampler {
 public:
  explicit ConvexSampler(const Cdag& g);

  // Starts from `seed_node` (kept even when its own inset exceeds K) and adds random frontier
  // nodes until none fits.
  std::vector<NodeId> grow(NodeId seed_node, std::size_t K, std::mt19937_64& rng);
  std::vector<NodeId> sample(std::size_t K, std::mt19937_64& rng);

  std::size_t inset_size() const { return inset_size_; }

 private:
  void reset();
  void add(NodeId v);
  bool keeps_convex(NodeId v) const;
  std::size_t inset_after(NodeId v);

  const Cdag& g_;
  std::uint32_t epoch_ = 0;
  std::uint32_t probe_ = 0;
  std::vector<std::uint32_t> member_, desc_, anc_, in_inset_, frontier_, seen_;
  std::vector<NodeId> members_, candidates_, stack_;
  std::size_t inset_size_ = 0;
};

struct SamplingReport {
  std::string kernel;
  Binding binding;
  std::string statement;  // hourglass statement whose instances are counted
  std::size_t K = 0;
  std::int64_t W = 0;     // width_min at the binding
  Rational bound;         // K^2/W + 2K
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t max_count = 0;  // largest |E ∩ statement|
  std::size_t max_total = 0;  // largest |E|
  Rational max_ratio;         // max_count / bound
  bool passed() const { return violations == 0; }
};

// Samples convex K-bounded sets on the kernel's CDAG and checks |E ∩ SX| <= K^2/W + 2K for the
// primary hourglass statement SX. Throws CdagError above sampling_node_ceiling nodes.
SamplingReport verify_sampling(const AffineKernel& kernel, const Binding& binding, std::size_t K,
                               std::size_t samples, std::uint64_t seed);

}  // namespace iolb
