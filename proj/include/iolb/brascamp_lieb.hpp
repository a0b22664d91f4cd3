#pragma once

#include "iolb/bound_expr.hpp"
#include "iolb/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iolb {

// minimize c.x subject to each row a.x (>=, <=, =) b and x >= 0.
struct LinearProgram {
  enum class Sense { at_least, at_most, equal };
  struct Row {
    std::vector<Rational> a;
    Sense sense;
    Rational b;
  };
  std::vector<Rational> c;
  std::vector<Row> rows;
};

// Exact two-phase simplex with Bland's rule. nullopt when infeasible; throws std::domain_error when unbounded.
std::optional<std::vector<Rational>> solve(const LinearProgram& lp);

enum class ProjectionOrigin { inset_path, hourglass_width, width_ratio, flatness };

struct Projection {
  std::vector<std::string> kept;  // sorted coordinate subset
  BoundExpr cap;
  ProjectionOrigin origin = ProjectionOrigin::inset_path;

  std::string to_string() const;  // phi_{i,j}
};

struct BLCertificate {
  std::vector<Rational> exponents;
  bool verified = false;

  Rational total() const;
};

class BLInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponents minimising sum_j weight_j * s_j with 0 <= s_j <= 1 and, for every coordinate subspace H,
// |H| <= sum_j s_j |kept_j & H|. Entries of `fixed` pin the corresponding exponent.
BLCertificate bl_exponents(const std::vector<std::string>& dims, const std::vector<Projection>& projections,
                           const std::vector<Rational>& weights = {},
                           const std::vector<std::optional<Rational>>& fixed = {});

bool bl_verify(const std::vector<std::string>& dims, const std::vector<Projection>& projections,
               const std::vector<Rational>& exponents);

// prod_j cap_j^{s_j}, omitting zero exponents.
BoundExpr bl_product(const std::vector<Projection>& projections, const std::vector<Rational>& exponents);

}  // namespace iolb
