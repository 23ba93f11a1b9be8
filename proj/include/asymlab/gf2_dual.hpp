#pragma once

// Characters of the Ledrappier group
//   X = { a : Z^2 -> F2  |  a(z1, z2) + a(z1 + 1, z2) + a(z1, z2 + 1) = 0 }
// as F2 Laurent polynomials in x (the T direction, z1) and y (the S direction, z2).
// The character with support P is a |-> (-1)^(sum of a over P). Shifting a character
// by S^n multiplies its polynomial by y^n, by T^n multiplies by x^n.
//
// A character is identically 1 on X iff its polynomial lies in the ideal generated
// by 1 + x + y. Substituting y = 1 + x maps F2[x^+-1, y^+-1] onto
// F2[x^+-1, (1+x)^-1], a domain, so the test reduces to a one-variable
// polynomial being zero once the x and (1+x) denominators are cleared.

#include "asymlab/common.hpp"
#include "asymlab/gf2_poly.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asym {

/// Exponent pair of a monomial x^t y^s. `t` is the z1 (T) shift, `s` the z2 (S) shift.
struct Exponent {
  std::int64_t t = 0;
  std::int64_t s = 0;
  friend auto operator<=>(const Exponent&, const Exponent&) = default;
};

/// Per-variable exponent span above which reduction refuses to allocate.
inline constexpr std::int64_t kMaxDegreeSpan = std::int64_t{1} << 20;

/// F2 Laurent polynomial in two variables, stored as its sorted support.
class LaurentPoly2 {
 public:
  LaurentPoly2() = default;

  /// Builds from a list of terms with F2 cancellation (a repeated term vanishes).
  static LaurentPoly2 from_terms(std::vector<Exponent> terms);
  static LaurentPoly2 monomial(std::int64_t t, std::int64_t s) { return from_terms({{t, s}}); }
  /// 1 + x + y, the defining relation of X.
  static LaurentPoly2 relation();

  const std::vector<Exponent>& support() const { return support_; }
  bool is_zero() const { return support_.empty(); }
  std::size_t size() const { return support_.size(); }

  friend bool operator==(const LaurentPoly2&, const LaurentPoly2&) = default;

  std::string to_string() const;

 private:
  std::vector<Exponent> support_;
};

LaurentPoly2 poly_add(const LaurentPoly2& p, const LaurentPoly2& q);
LaurentPoly2 poly_mul(const LaurentPoly2& p, const LaurentPoly2& q);
LaurentPoly2 monomial_shift(const LaurentPoly2& p, std::int64_t t, std::int64_t s);

/// numerator / (x^pole_order_x * (1+x)^pole_order_x1) in F2[x^+-1, (1+x)^-1].
/// Canonical: a nonzero numerator is divisible by neither x nor 1+x, and the zero
/// element has both pole orders 0.
struct ReducedPoly {
  Gf2Poly numerator;
  std::int64_t pole_order_x = 0;
  std::int64_t pole_order_x1 = 0;

  bool is_zero() const { return numerator.is_zero(); }
  friend bool operator==(const ReducedPoly&, const ReducedPoly&) = default;

  /// Restores the canonical form after arithmetic.
  void canonicalize();
};

ReducedPoly operator+(const ReducedPoly& a, const ReducedPoly& b);
ReducedPoly operator*(const ReducedPoly& a, const ReducedPoly& b);

/// Image of p in F2[x^+-1, y^+-1] / (1 + x + y). Throws ResourceError past kMaxDegreeSpan.
ReducedPoly reduce_mod_relation(const LaurentPoly2& p);

struct Character {
  LaurentPoly2 poly;

  Character shifted(std::int64_t t, std::int64_t s) const { return {monomial_shift(poly, t, s)}; }
  /// Pointwise product of characters.
  friend Character operator*(const Character& a, const Character& b) { return {poly_add(a.poly, b.poly)}; }
  friend bool operator==(const Character&, const Character&) = default;
};

bool is_trivial_on_group(const Character& chi);

/// Integral of chi against Haar measure: 1 if chi is trivial on X, else 0.
Rational character_integral(const Character& chi);

/// The set {chi(shifted) = -1}, or its complement {= +1} when `complement` is set.
struct CharacterSetTerm {
  Character chi;
  Exponent shift;
  bool complement = false;
};

/// Exact Haar measure of the intersection of the listed character sets, by
/// expanding the product of indicators (1 -+ chi_i)/2 into characters.
/// Requires 1 <= terms.size() <= 20.
Rational character_set_correlation(std::span<const CharacterSetTerm> terms);

/// How the exponent sequence n(m) in chi1 * S^{-n}chi2 * T^{-n}chi3 is read.
enum class ShiftReading { kPowerOfTwo, kLinear };

std::int64_t shift_for(int m, ShiftReading reading);

/// Smallest m0 <= m_max such that chi1 * S^{-n(m)} chi2 * T^{-n(m)} chi3 is
/// nontrivial for every m in [m0, m_max]; nullopt if the product is trivial at m_max.
/// Throws PreconditionError if any input is trivial on X or m_max < 1.
std::optional<int> min_mixing_threshold(const Character& chi1, const Character& chi2, const Character& chi3,
                                        int m_max, ShiftReading reading = ShiftReading::kPowerOfTwo);

/// Parses "[(0,0),(1,0),(0,1)]" (whitespace-insensitive, duplicates rejected).
LaurentPoly2 parse_support_literal(const std::string& text);
std::string format_support_literal(const LaurentPoly2& p);

}  // namespace asym
