#include "iolb/affine.hpp"

#include <stdexcept>

namespace iolb {

AffineExpr AffineExpr::symbol(std::string name, std::int64_t coeff) {
  AffineExpr e;
  e.add_term(name, coeff);
  return e;
}

void AffineExpr::add_term(const std::string& name, std::int64_t coeff) {
  if (coeff == 0) return;
  auto it = terms_.find(name);
  if (it == terms_.end()) {
    terms_.emplace(name, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0) terms_.erase(it);
}

std::int64_t AffineExpr::coefficient(std::string_view name) const {
  auto it = terms_.find(name);
  return it == terms_.end() ? 0 : it->second;
}

std::int64_t AffineExpr::evaluate(const Binding& values) const {
  std::int64_t v = constant_;
  for (const auto& [name, coeff] : terms_) {
    auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("unbound symbol '" + name + "'");
    v += coeff * it->second;
  }
  return v;
}

AffineExpr AffineExpr::substitute(std::string_view name, const AffineExpr& value) const {
  std::int64_t c = coefficient(name);
  if (c == 0) return *this;
  AffineExpr out = *this;
  out.terms_.erase(out.terms_.find(name));
  return out + c * value;
}

AffineExpr AffineExpr::partial(const Binding& values) const {
  AffineExpr out(constant_);
  for (const auto& [name, coeff] : terms_) {
    auto it = values.find(name);
    if (it == values.end())
      out.add_term(name, coeff);
    else
      out.constant_ += coeff * it->second;
  }
  return out;
}

AffineExpr AffineExpr::operator-() const { return -1 * *this; }

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
  AffineExpr out = a;
  out.constant_ += b.constant_;
  for (const auto& [name, coeff] : b.terms_) out.add_term(name, coeff);
  return out;
}

AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + (-b); }

AffineExpr operator*(std::int64_t c, const AffineExpr& a) {
  AffineExpr out;
  if (c == 0) return out;
  out.constant_ = c * a.constant_;
  for (const auto& [name, coeff] : a.terms_) out.terms_.emplace(name, c * coeff);
  return out;
}

std::string AffineExpr::to_string() const {
  std::string s;
  for (const auto& [name, coeff] : terms_) {
    if (s.empty()) {
      if (coeff == -1)
        s += "-";
      else if (coeff != 1)
        s += std::to_string(coeff) + "*";
    } else {
      s += coeff < 0 ? " - " : " + ";
      std::int64_t m = coeff < 0 ? -coeff : coeff;
      if (m != 1) s += std::to_string(m) + "*";
    }
    s += name;
  }
  if (s.empty()) return std::to_string(constant_);
  if (constant_ > 0) s += " + " + std::to_string(constant_);
  if (constant_ < 0) s += " - " + std::to_string(-constant_);
  return s;
}

}  // namespace iolb
