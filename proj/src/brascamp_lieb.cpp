#include "iolb/brascamp_lieb.hpp"

#include <algorithm>
#include <bit>

namespace iolb {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : t_(rows, std::vector<Rational>(cols + 1)), basis_(rows), obj_(cols + 1), cols_(cols) {}

  std::vector<Rational>& row(std::size_t i) { return t_[i]; }
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return cols_; }
  std::vector<Rational>& objective() { return obj_; }

  void pivot(std::size_t p, std::size_t q) {
    Rational inv = Rational(1) / t_[p][q];
    for (auto& x : t_[p]) x *= inv;
    auto eliminate = [&](std::vector<Rational>& r) {
      if (r[q] == 0) return;
      Rational f = r[q];
      for (std::size_t c = 0; c < r.size(); ++c)
        if (t_[p][c] != 0) r[c] -= f * t_[p][c];
    };
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (i != p) eliminate(t_[i]);
    eliminate(obj_);
    basis_[p] = q;
  }

  // Runs Bland's rule over columns [0, allowed). Returns false when unbounded.
  bool optimize(std::size_t allowed) {
    const std::size_t rhs = cols();
    for (;;) {
      std::size_t q = allowed;
      for (std::size_t j = 0; j < allowed; ++j)
        if (obj_[j] < 0) {
          q = j;
          break;
        }
      if (q == allowed) return true;
      std::optional<std::size_t> p;
      Rational best;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i][q] <= 0) continue;
        Rational ratio = t_[i][rhs] / t_[i][q];
        if (!p || ratio < best || (ratio == best && basis_[i] < basis_[*p])) {
          p = i;
          best = ratio;
        }
      }
      if (!p) return false;
      pivot(*p, q);
    }
  }

  void set_objective(const std::vector<Rational>& cost) {
    obj_ = cost;
    obj_.resize(cols() + 1);
    for (std::size_t i = 0; i < t_.size(); ++i) {
      Rational cb = obj_[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t c = 0; c < obj_.size(); ++c) obj_[c] -= cb * t_[i][c];
    }
  }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> obj_;
  std::size_t cols_;
};

}  // namespace

std::optional<std::vector<Rational>> solve(const LinearProgram& lp) {
  const std::size_t n = lp.c.size();
  const std::size_t m = lp.rows.size();
  std::size_t slacks = 0;
  for (const auto& r : lp.rows) {
    if (r.a.size() != n) throw std::invalid_argument("linear program row has the wrong width");
    if (r.sense != LinearProgram::Sense::equal) ++slacks;
  }
  const std::size_t artificial = n + slacks;
  const std::size_t total = artificial + m;
  Tableau t(m, total);
  std::size_t s = n;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    auto& row = t.row(i);
    for (std::size_t j = 0; j < n; ++j) row[j] = r.a[j];
    if (r.sense == LinearProgram::Sense::at_least) row[s++] = -1;
    if (r.sense == LinearProgram::Sense::at_most) row[s++] = 1;
    row[total] = r.b;
    if (r.b < 0)
      for (auto& x : row) x = -x;
    row[artificial + i] = 1;
    t.basis(i) = artificial + i;
  }
  std::vector<Rational> phase1(total, Rational(0));
  for (std::size_t i = 0; i < m; ++i) phase1[artificial + i] = 1;
  t.set_objective(phase1);
  t.optimize(total);
  if (t.objective()[total] != 0) return std::nullopt;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis(i) < artificial) continue;
    for (std::size_t j = 0; j < artificial; ++j)
      if (t.row(i)[j] != 0) {
        t.pivot(i, j);
        break;
      }
  }
  std::vector<Rational> cost(total, Rational(0));
  std::copy(lp.c.begin(), lp.c.end(), cost.begin());
  t.set_objective(cost);
  if (!t.optimize(artificial)) throw std::domain_error("linear program is unbounded");
  std::vector<Rational> x(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis(i) < n) x[t.basis(i)] = t.row(i)[total];
  return x;
}

std::string Projection::to_string() const {
  std::string out = "phi_{";
  for (std::size_t i = 0; i < kept.size(); ++i) out += (i ? "," : "") + kept[i];
  return out + "}";
}

Rational BLCertificate::total() const {
  Rational s = 0;
  for (const auto& e : exponents) s += e;
  return s;
}

namespace {

std::vector<std::vector<int>> ranks(const std::vector<std::string>& dims, const std::vector<Projection>& projections) {
  if (dims.size() > 6) throw std::invalid_argument("at most 6 dimensions are supported");
  std::vector<std::vector<int>> in(projections.size(), std::vector<int>(dims.size(), 0));
  for (std::size_t j = 0; j < projections.size(); ++j)
    for (const auto& k : projections[j].kept) {
      auto it = std::find(dims.begin(), dims.end(), k);
      if (it == dims.end()) throw std::invalid_argument("projection keeps unknown dimension " + k);
      in[j][static_cast<std::size_t>(it - dims.begin())] = 1;
    }
  return in;
}

int rank_in(const std::vector<int>& kept, unsigned mask) {
  int r = 0;
  for (std::size_t d = 0; d < kept.size(); ++d)
    if (mask & (1u << d)) r += kept[d];
  return r;
}

}  // namespace

bool bl_verify(const std::vector<std::string>& dims, const std::vector<Projection>& projections,
               const std::vector<Rational>& exponents) {
  if (exponents.size() != projections.size()) return false;
  for (const auto& s : exponents)
    if (s < 0 || s > 1) return false;
  auto in = ranks(dims, projections);
  for (unsigned mask = 1; mask < (1u << dims.size()); ++mask) {
    Rational rhs = 0;
    for (std::size_t j = 0; j < projections.size(); ++j) rhs += exponents[j] * rank_in(in[j], mask);
    if (rhs < std::popcount(mask)) return false;
  }
  return true;
}

BLCertificate bl_exponents(const std::vector<std::string>& dims, const std::vector<Projection>& projections,
                           const std::vector<Rational>& weights, const std::vector<std::optional<Rational>>& fixed) {
  auto in = ranks(dims, projections);
  const std::size_t p = projections.size();
  LinearProgram lp;
  lp.c.assign(p, Rational(1));
  if (!weights.empty()) {
    if (weights.size() != p) throw std::invalid_argument("one weight per projection expected");
    lp.c = weights;
  }
  for (unsigned mask = 1; mask < (1u << dims.size()); ++mask) {
    LinearProgram::Row r{std::vector<Rational>(p), LinearProgram::Sense::at_least, Rational(std::popcount(mask))};
    for (std::size_t j = 0; j < p; ++j) r.a[j] = rank_in(in[j], mask);
    lp.rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < p; ++j) {
    LinearProgram::Row r{std::vector<Rational>(p), LinearProgram::Sense::at_most, Rational(1)};
    r.a[j] = 1;
    if (j < fixed.size() && fixed[j]) {
      r.sense = LinearProgram::Sense::equal;
      r.b = *fixed[j];
    }
    lp.rows.push_back(std::move(r));
  }
  auto x = solve(lp);
  if (!x) {
    std::string msg = "no Brascamp-Lieb exponents for {";
    for (std::size_t j = 0; j < p; ++j) msg += (j ? ", " : "") + projections[j].to_string();
    throw BLInfeasible(msg + "}");
  }
  BLCertificate cert{*x, false};
  cert.verified = bl_verify(dims, projections, cert.exponents);
  return cert;
}

BoundExpr bl_product(const std::vector<Projection>& projections, const std::vector<Rational>& exponents) {
  std::vector<BoundExpr> factors;
  for (std::size_t j = 0; j < projections.size(); ++j)
    if (exponents[j] != 0) factors.push_back(BoundExpr::power(projections[j].cap, exponents[j]));
  return BoundExpr::product(std::move(factors));
}

}  // namespace iolb
