#pragma once

#include "iolb/cdag.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iolb {

using Schedule = std::vector<NodeId>;

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sequential program order of the kernel.
Schedule reference_schedule(const Cdag& g);

// floor(S/M) - 1; throws ScheduleError when S <= 2M.
std::int64_t default_block(const Binding& binding);

// Left-looking blocked orders of the right-looking CDAGs (same nodes, different order).
Schedule tiled_mgs_schedule(const Cdag& g, std::int64_t B);
Schedule tiled_a2v_schedule(const Cdag& g, std::int64_t B);

// Dispatches on the kernel name; only mgs and hh_a2v have tiled orders.
Schedule tiled_schedule(const Cdag& g, std::int64_t B);
bool has_tiled_schedule(std::string_view kernel);
// Debug dump: one node id per line.
std::string dump_schedule(const Schedule& s);

}  // namespace iolb
