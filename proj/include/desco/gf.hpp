#pragma once

#include "desco/types.hpp"

#include <array>
#include <cstdio>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace desco {

/// Defining parameters of GF(p) or GF(2^m).
struct FieldSpec {
  enum class Kind { prime, binary_extension };

  Kind kind = Kind::binary_extension;
  /// Characteristic p for prime fields, degree m for GF(2^m).
  unsigned param = 1;
  /// Reduction polynomial with the x^m bit set (binary extension only).
  std::uint32_t poly = 0x3;

  static FieldSpec prime(unsigned p) { return {Kind::prime, p, 0}; }
  /// GF(2^m); poly = 0 selects the canonical polynomial for m.
  static FieldSpec binary(unsigned m, std::uint32_t poly = 0);

  std::uint32_t order() const {
    return kind == Kind::prime ? param : (std::uint32_t{1} << param);
  }
  std::string describe() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

/// Canonical primitive reduction polynomials, degree 1..16.
inline constexpr std::array<std::uint32_t, 17> kCanonicalPoly = {
    0x0,    0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,    0x11D,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

inline FieldSpec FieldSpec::binary(unsigned m, std::uint32_t p) {
  if (m < 1 || m > 16) throw usage_error("GF(2^m) supports 1 <= m <= 16");
  return {Kind::binary_extension, m, p == 0 ? kCanonicalPoly[m] : p};
}

inline std::string FieldSpec::describe() const {
  if (kind == Kind::prime) return "GF(" + std::to_string(param) + ")";
  char buf[64];
  std::snprintf(buf, sizeof buf, "GF(2^%u) poly=0x%X", param, poly);
  return buf;
}

namespace detail {

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline int poly_degree(std::uint64_t a) {
  int d = -1;
  while (a) {
    a >>= 1;
    ++d;
  }
  return d;
}

inline std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  const int dm = poly_degree(m);
  for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) a ^= m << (d - dm);
  return a;
}

/// Exhaustive factor search over all polynomials of degree 1..m/2.
inline bool is_irreducible(std::uint32_t poly, unsigned m) {
  if (poly_degree(poly) != static_cast<int>(m)) return false;
  for (std::uint64_t f = 2; poly_degree(f) <= static_cast<int>(m / 2); ++f)
    if (poly_mod(poly, f) == 0) return false;
  return true;
}

}  // namespace detail

/// Arithmetic tables for one field. Immutable after construction.
class GaloisField {
 public:
  explicit GaloisField(FieldSpec spec) : spec_(spec) {
    if (spec.kind == FieldSpec::Kind::prime) {
      if (!detail::is_prime(spec.param) || spec.param >= (1u << 31))
        throw usage_error("prime field needs a prime characteristic below 2^31");
      return;
    }
    if (spec.param < 1 || spec.param > 16) throw usage_error("GF(2^m) supports 1 <= m <= 16");
    if (!detail::is_irreducible(spec.poly, spec.param))
      throw usage_error("reduction polynomial is not irreducible of degree " +
                        std::to_string(spec.param));
    build_tables();
  }

  static std::shared_ptr<const GaloisField> make(FieldSpec spec) {
    return std::make_shared<const GaloisField>(spec);
  }

  const FieldSpec& spec() const { return spec_; }
  std::uint32_t order() const { return spec_.order(); }
  bool binary() const { return spec_.kind == FieldSpec::Kind::binary_extension; }

  Symbol add(Symbol a, Symbol b) const {
    if (binary()) return a ^ b;
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Symbol>(s >= spec_.param ? s - spec_.param : s);
  }
  Symbol neg(Symbol a) const {
    if (binary() || a == 0) return a;
    return spec_.param - a;
  }
  Symbol sub(Symbol a, Symbol b) const { return add(a, neg(b)); }

  Symbol mul(Symbol a, Symbol b) const {
    if (a == 0 || b == 0) return 0;
    if (binary()) return exp_[log_[a] + log_[b]];
    return static_cast<Symbol>((std::uint64_t{a} * b) % spec_.param);
  }

  Symbol inv(Symbol a) const {
    if (a == 0) throw domain_error("inverse of zero");
    if (binary()) return exp_[(order() - 1) - log_[a]];
    return pow(a, spec_.param - 2);
  }
  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

  Symbol pow(Symbol a, std::uint64_t e) const {
    Symbol r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// a += c*b, the elimination inner loop.
  void axpy(std::vector<Symbol>& a, Symbol c, const std::vector<Symbol>& b) const {
    if (c == 0) return;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (b[i]) a[i] = add(a[i], mul(c, b[i]));
  }

 private:
  // Shift-and-reduce product, used only to seed the tables.
  Symbol slow_mul(Symbol a, Symbol b) const {
    std::uint32_t r = 0;
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      a <<= 1;
      if (a & order()) a ^= spec_.poly;
    }
    return r;
  }

  void build_tables() {
    const std::uint32_t q = order();
    log_.assign(q, 0);
    exp_.assign(2 * q, 0);
    if (q == 2) {
      exp_ = {1, 1, 1, 1};
      return;
    }
    // x is a generator for primitive polynomials; otherwise search one.
    for (Symbol g = 2; g < q; ++g) {
      std::vector<bool> seen(q, false);
      Symbol v = 1;
      std::uint32_t i = 0;
      for (; i < q - 1; ++i) {
        if (seen[v]) break;
        seen[v] = true;
        exp_[i] = v;
        log_[v] = i;
        v = slow_mul(v, g);
      }
      if (i == q - 1) break;
    }
    for (std::uint32_t i = q - 1; i < 2 * q; ++i) exp_[i] = exp_[i - (q - 1)];
  }

  FieldSpec spec_;
  std::vector<std::uint32_t> log_;
  std::vector<Symbol> exp_;
};

using FieldPtr = std::shared_ptr<const GaloisField>;

/// Smallest GF(2^m) with 2^m >= n (at least GF(2)).
inline FieldSpec default_field_for(unsigned n) {
  unsigned m = 1;
  while ((1u << m) < n) ++m;
  return FieldSpec::binary(m);
}

/// A value tagged with its field.
class FieldElement {
 public:
  FieldElement(Symbol v, FieldPtr f) : value_(v), field_(std::move(f)) {
    if (!field_) throw usage_error("field element without a field");
    if (v >= field_->order()) throw usage_error("value out of range for " + field_->spec().describe());
  }

  Symbol value() const { return value_; }
  const FieldPtr& field() const { return field_; }

  friend FieldElement add(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_->add(a.value_, b.value_), a.field_};
  }
  friend FieldElement sub(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_->sub(a.value_, b.value_), a.field_};
  }
  friend FieldElement mul(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_->mul(a.value_, b.value_), a.field_};
  }
  friend FieldElement inv(const FieldElement& a) { return {a.field_->inv(a.value_), a.field_}; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) { return add(a, b); }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return sub(a, b); }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) { return mul(a, b); }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * inv(b); }
  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.value_ == b.value_ && a.field_->spec() == b.field_->spec();
  }

 private:
  static void check(const FieldElement& a, const FieldElement& b) {
    if (a.field_ != b.field_ && !(a.field_->spec() == b.field_->spec()))
      throw usage_error("operands belong to different fields");
  }

  Symbol value_;
  FieldPtr field_;
};

}  // namespace desco
