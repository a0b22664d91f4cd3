#pragma once

#include "iolb/cdag.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iolb {

enum class Policy { lru, belady };

std::string to_string(Policy p);
Policy parse_policy(std::string_view name);

class PebbleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PebbleTrace {
  std::uint64_t loads = 0;
  // Computed values written back: evicted while still needed or an output.
  std::uint64_t stores = 0;
  std::size_t peak_red = 0;
  std::size_t S = 0;
  Policy policy = Policy::belady;
  std::vector<std::uint32_t> loads_per_node;  // filled when requested
};

// Red-white pebble game in schedule order. Operands of the current step are pinned; the result may
// evict after them. Belady evicts the farthest next use, ties by smallest id.
PebbleTrace run(const Cdag& g, std::span<const NodeId> schedule, std::size_t S, Policy policy,
                bool per_node_loads = false);

// Fewest loads for a fixed schedule without recomputation (furthest-next-use eviction).
std::uint64_t min_loads_for_schedule(const Cdag& g, std::span<const NodeId> schedule, std::size_t S);

std::size_t max_in_degree(const Cdag& g);

}  // namespace iolb
