#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace asym {

/// Dense polynomial over F2 in one variable x, bit i = coefficient of x^i.
/// Storage is trimmed so that equal polynomials compare equal.
class Gf2Poly {
 public:
  Gf2Poly() = default;

  static Gf2Poly monomial(std::uint64_t exponent);
  static Gf2Poly from_exponents(std::span<const std::uint64_t> exponents);
  /// (1 + x)^n; coefficient i is binom(n, i) mod 2, i.e. set iff i is a submask of n.
  static Gf2Poly one_plus_x_pow(std::uint64_t n);

  bool is_zero() const { return words_.empty(); }
  /// Degree, or -1 for the zero polynomial.
  std::int64_t degree() const;
  bool coeff(std::uint64_t e) const;
  void flip(std::uint64_t e);
  std::size_t term_count() const;
  std::vector<std::uint64_t> exponents() const;

  Gf2Poly& operator+=(const Gf2Poly& other);
  friend Gf2Poly operator+(Gf2Poly a, const Gf2Poly& b) { return a += b; }
  friend Gf2Poly operator*(const Gf2Poly& a, const Gf2Poly& b);
  friend bool operator==(const Gf2Poly&, const Gf2Poly&) = default;

  /// Multiply by x^k.
  Gf2Poly shifted(std::uint64_t k) const;
  /// Add x^k * other into this polynomial.
  void add_shifted(const Gf2Poly& other, std::uint64_t k);

  /// Divide out the largest power of x; returns that power.
  std::uint64_t strip_x();
  /// Divide out the largest power of (1 + x); returns that power.
  std::uint64_t strip_one_plus_x();
  /// p(x) -> p(1 + x). An involution.
  Gf2Poly compose_one_plus_x() const;

  std::string to_string() const;

 private:
  void trim();
  std::vector<std::uint64_t> words_;
};

}  // namespace asym
