#pragma once

#include "iolb/bounds.hpp"
#include "iolb/pebble.hpp"
#include "iolb/sampling.hpp"
#include "iolb/schedules.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace iolb {

using Json = nlohmann::ordered_json;

Json to_json(const Binding& b);
Json to_json(const Rational& r);  // {"num": "...", "den": "..."}
Json to_json(const HourglassReport& r);
Json to_json(const DerivedBound& b, const Binding* binding = nullptr);
Json to_json(const BoundValue& v);
Json to_json(const SamplingReport& r);

enum class ScheduleKind { reference, tiled };
std::string to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(std::string_view name);

struct Simulation {
  std::string kernel;
  Binding binding;  // problem sizes and S
  std::string schedule_id;  // "reference" or "tiled-B<b>"
  std::optional<std::int64_t> block;
  Schedule order;
  PebbleTrace trace;
  BestBound hourglass;  // best applicable proof-convention bound
  BestBound classical;
  // loads over the certified lower end of the best lower bound; absent when no bound applies or it is 0.
  std::optional<Rational> ratio;
};

// Runs the pebble game on the kernel's CDAG. A tiled schedule without `block` uses default_block
// clamped to N; throws ScheduleError when tiling is inapplicable.
Simulation simulate(const std::string& kernel_id, const Binding& binding, ScheduleKind schedule,
                    std::optional<std::int64_t> block, Policy policy, const Derivation* derivation = nullptr);
Json to_json(const Simulation& s);

// Grid entries are small affine forms in the already fixed sizes, e.g. "M/2", "2M+1", "8M", "64".
std::int64_t evaluate_grid_expr(std::string_view expr, const Binding& known);

struct GridSpec {
  std::vector<std::int64_t> M;
  std::vector<std::string> N;  // values for N-only kernels, forms in M otherwise
  std::vector<std::string> S;  // forms in M and N
};
std::vector<Binding> expand_grid(const GridSpec& grid, bool has_m);

struct SweepRow {
  Binding binding;
  std::optional<std::int64_t> block;
  std::optional<Interval> classical;
  std::optional<Interval> hourglass;
  std::optional<std::uint64_t> loads_reference;
  std::optional<std::uint64_t> loads_tiled;
  std::optional<Rational> ratio;  // loads_tiled (or loads_reference) over the hourglass bound
  std::string error;
};

SweepRow sweep_row(const std::string& kernel_id, const Derivation& d, const Binding& binding, Policy policy);
// Rows in grid order; rows are computed on up to `threads` workers.
std::vector<SweepRow> sweep(const std::string& kernel_id, const GridSpec& grid, Policy policy, unsigned threads = 0);
// Header and rows; rationals appear as 6-digit decimals followed by exact _num/_den columns.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace iolb
