#pragma once

#include "iolb/bound_expr.hpp"
#include "iolb/brascamp_lieb.hpp"
#include "iolb/hourglass.hpp"
#include "iolb/kernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iolb {

enum class Regime { classical, general, small_cache };
// proof: full instance count and the loop extent as the cap of the broadcast projection.
// table: first temporal step dropped and width_min as that cap.
enum class Convention { proof, table };

std::string to_string(Regime r);
std::string to_string(Convention c);

struct DerivedBound {
  std::string kernel;
  std::string statement;
  Regime regime = Regime::classical;
  Convention convention = Convention::proof;
  BoundExpr K;
  BoundExpr emax;
  BoundExpr node_count;
  BoundExpr q;
  // Hourglass regimes need width_min >= 1; small-cache also needs S <= width_min.
  std::optional<BoundExpr> width_min;
  // Split parameter of a fragment bound, maximised over [split_lower, split_upper] when left unbound.
  std::optional<std::string> split;
  AffineExpr split_lower, split_upper;
  std::vector<std::string> notes;
};

// Symbols K (set-size budget) and S (cache size) are left free in projection caps.
std::vector<Projection> inset_projections(const AffineKernel& kernel, std::string_view statement);

// Instance count of a statement as a polynomial in the parameters, optionally without the first temporal step.
Poly instance_count(const AffineKernel& kernel, std::string_view statement, bool skip_first_step = false);

DerivedBound classical_bound(const AffineKernel& kernel, std::string_view statement, const BoundExpr& node_count);

BoundExpr hourglass_Iprime_bound(const HourglassReport& report, const std::vector<Projection>& projections,
                                 Convention convention = Convention::proof);

struct FlatBound {
  BoundExpr e, R, bound;
  std::vector<std::string> w;  // kept dimensions of the selected projection
  bool fallback = false;       // no projection touches the neutral dimensions
};
FlatBound hourglass_F_bound(const HourglassReport& report, const std::vector<Projection>& projections,
                            const BoundExpr& node_count);

std::vector<DerivedBound> hourglass_bound(const AffineKernel& kernel, std::string_view statement,
                                          const HourglassReport& report, const BoundExpr& node_count,
                                          Convention convention = Convention::proof);

struct Derivation {
  std::string kernel;
  Convention convention = Convention::proof;
  std::vector<HourglassReport> reports;
  std::vector<DerivedBound> classical;
  std::vector<DerivedBound> hourglass;
  std::size_t primary = 0;          // index into hourglass: largest general bound at the regime point
  std::size_t primary_classical = 0;

  const DerivedBound& primary_bound() const { return hourglass.at(primary); }
  const DerivedBound* find(std::string_view statement, Regime regime) const;
};

// Detection, loop splitting where width_min is constant, and bounds for every hourglass statement.
Derivation derive(const AffineKernel& kernel, Convention convention = Convention::proof);

// Point at which symbolic bounds are compared: M=2^20, N=2^19, S=2^24, K=2S, split=N/2.
Valuation regime_point();

struct BoundValue {
  bool applicable = false;
  std::string reason;
  std::optional<Rational> exact;  // absent for irrational values
  Interval enclosure;
  std::optional<std::int64_t> split_value;
};

BoundValue evaluate_bound(const DerivedBound& b, const Binding& binding);

struct BestBound {
  const DerivedBound* bound = nullptr;
  BoundValue value;
};
// Largest applicable hourglass bound at `binding` (by certified lower end).
BestBound best_hourglass(const Derivation& d, const Binding& binding);
BestBound best_classical(const Derivation& d, const Binding& binding);
// Largest applicable hourglass and classical bounds of one statement.
BestBound best_hourglass(const Derivation& d, const Binding& binding, std::string_view statement);
BestBound best_classical(const Derivation& d, const Binding& binding, std::string_view statement);

struct CatalogEntry {
  std::string kernel;
  BoundExpr old_bound, new_bound;
  BoundExpr old_leading, new_leading;  // dominant fractional terms
  std::optional<BoundExpr> upper;
};
CatalogEntry catalog(std::string_view kernel_id);
std::vector<std::string> catalog_names();

}  // namespace iolb
