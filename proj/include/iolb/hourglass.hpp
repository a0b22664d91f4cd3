#pragma once

#include "iolb/bound_expr.hpp"
#include "iolb/cdag.hpp"
#include "iolb/kernel.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iolb {

struct HourglassReport {
  std::string statement;
  std::vector<std::string> temporal;
  std::vector<std::string> broadcast;
  std::vector<std::string> neutral;
  // Instances at step k+1 on the chains between the reduction/broadcast slices at k and k+2.
  // Absent when the measured counts are not affine.
  std::optional<BoundExpr> width;
  // Extent of the broadcast dimensions within one temporal step.
  BoundExpr step_width;
  // step_width minimised over the temporal loop range.
  BoundExpr width_min;
  // Parametric upper bound on the number of values of each statement dimension.
  std::map<std::string, BoundExpr> extents;

  bool split_recommended() const { return width_min.symbols().empty(); }
};

struct DetectOptions {
  std::vector<Binding> fit;  // at least three bindings; the first is also used for the chain check
  Binding held_out;
};

DetectOptions default_detect_options(const AffineKernel& kernel);

std::optional<HourglassReport> detect(const AffineKernel& kernel, std::string_view statement,
                                      const DetectOptions& options);
std::optional<HourglassReport> detect(const AffineKernel& kernel, std::string_view statement);
// Reports for every statement exhibiting the pattern, in program order.
std::vector<HourglassReport> detect_all(const AffineKernel& kernel);

// Splits the outermost temporal loop of `statement` at a fresh parameter.
// Throws KernelError when the hourglass width is already parametric.
std::pair<AffineKernel, AffineKernel> split_temporal(const AffineKernel& kernel, std::string_view statement,
                                                     const std::string& split);

// Checks SX[k,j,i] ~> SX[next(k),j,i'] on `g` for up to `max_pairs` sampled (i, i') pairs.
struct ChainCheck {
  std::size_t pairs_checked = 0;
  std::size_t pairs_failed = 0;
};
ChainCheck check_chains(const Cdag& g, const HourglassReport& report, std::size_t max_pairs, std::uint64_t seed);

}  // namespace iolb
