#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace iolb {

using Binding = std::map<std::string, std::int64_t, std::less<>>;

// constant + sum of coeff * symbol, over loop indices and parameters.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(std::int64_t constant) : constant_(constant) {}  // NOLINT(implicit)

  static AffineExpr symbol(std::string name, std::int64_t coeff = 1);

  std::int64_t constant() const { return constant_; }
  const std::map<std::string, std::int64_t, std::less<>>& terms() const { return terms_; }
  std::int64_t coefficient(std::string_view name) const;
  bool references(std::string_view name) const { return coefficient(name) != 0; }
  bool is_constant() const { return terms_.empty(); }

  // Throws std::out_of_range naming the first unbound symbol.
  std::int64_t evaluate(const Binding& values) const;
  AffineExpr substitute(std::string_view name, const AffineExpr& value) const;
  // Replaces every bound symbol by its value; unbound symbols stay.
  AffineExpr partial(const Binding& values) const;

  AffineExpr operator-() const;
  friend AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator-(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator*(std::int64_t c, const AffineExpr& a);
  friend AffineExpr operator*(const AffineExpr& a, std::int64_t c) { return c * a; }
  friend bool operator==(const AffineExpr& a, const AffineExpr& b) = default;

  std::string to_string() const;

 private:
  void add_term(const std::string& name, std::int64_t coeff);

  std::int64_t constant_ = 0;
  std::map<std::string, std::int64_t, std::less<>> terms_;
};

}  // namespace iolb
