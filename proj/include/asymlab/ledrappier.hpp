#pragma once

// Haar-random patches of the Ledrappier group and exact / sampled measures of
// finite intersections of character sets and cylinder sets.
//
// Every query is first translated (by a common S power, then a common T power)
// so that all evaluated cells sit in the window 0 <= z2, 0 <= z1. Haar measure is
// invariant under both shifts, and in that half-plane every cell is a fixed F2
// linear functional of row 0:
//     a(z1, z2) = sum_i binom(z2, i) a(z1 + i, 0)  (mod 2),
// while row 0 itself is uniform under Haar measure.

#include "asymlab/bitvector.hpp"
#include "asymlab/common.hpp"
#include "asymlab/gf2_dual.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace asym {

/// Window of a configuration: row s holds cells (z1, s) for 0 <= z1 < width - s.
class ConfigWindow {
 public:
  /// Builds rows 1..height from row 0 by the local rule. Requires row0.size() > height.
  ConfigWindow(BitVector row0, std::int64_t height);

  std::int64_t width() const { return static_cast<std::int64_t>(rows_.front().size()); }
  std::int64_t height() const { return static_cast<std::int64_t>(rows_.size()) - 1; }
  const BitVector& row(std::int64_t s) const { return rows_[static_cast<std::size_t>(s)]; }
  bool contains(std::int64_t z1, std::int64_t z2) const {
    return z2 >= 0 && z2 <= height() && z1 >= 0 && z1 < width() - z2;
  }
  bool at(std::int64_t z1, std::int64_t z2) const { return row(z2).test(static_cast<std::size_t>(z1)); }

  /// rows[s+1][z1] == rows[s][z1] ^ rows[s][z1+1] wherever all three cells exist.
  bool satisfies_local_rule() const;

 private:
  std::vector<BitVector> rows_;
};

/// Row 0 is `width` bits from Philox substream 0 of `seed` (64 bits per next64()).
/// Throws PreconditionError unless width > height >= 0.
ConfigWindow sample_config(std::int64_t width, std::int64_t height, std::uint64_t seed);

/// Row-0 columns whose XOR is cell (z1, z2): { z1 + i : binom(z2, i) odd }.
std::vector<std::int64_t> cell_functional(std::int64_t z1, std::int64_t z2);

struct Cell {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct CylinderConstraint {
  Cell cell;
  bool value = false;
};

/// {a : chi(a) = -1}
struct CharacterSet {
  Character chi;
};

/// {a : a(cell) = value for every constraint}; cells must have z2 >= 0.
struct Cylinder {
  std::vector<CylinderConstraint> constraints;
};

using SetSpec = std::variant<CharacterSet, Cylinder>;

/// The set translated so that its cells move by `shift` (t along z1, s along z2),
/// the same convention as Character::shifted.
struct ShiftedSet {
  SetSpec set;
  Exponent shift;
};

/// Cap on the row-0 width a query may need.
inline constexpr std::int64_t kDefaultWindowCap = std::int64_t{1} << 16;

/// Exact measure of the intersection via Gaussian elimination over F2 on row 0:
/// 0 if the affine system is inconsistent, else 2^-rank. Accepts character sets
/// as well as cylinders.
Rational exact_correlation(std::span<const ShiftedSet> sets, std::int64_t window_cap = kDefaultWindowCap);

/// exact_correlation restricted to cylinder sets; throws PreconditionError otherwise.
Rational exact_cylinder_correlation(std::span<const ShiftedSet> sets,
                                    std::int64_t window_cap = kDefaultWindowCap);

struct McOptions {
  std::int64_t window_cap = kDefaultWindowCap;
  bool parallel = true;
};

struct McEstimate {
  Rational estimate;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double stderr_ = 0.0;
};

/// Monte Carlo estimate from `samples` Haar-random windows. Sample i comes from
/// Philox substream i / 2^12 of `seed`, so results do not depend on thread count.
McEstimate mc_correlation(std::span<const ShiftedSet> sets, std::uint64_t samples, std::uint64_t seed,
                          const McOptions& options = {});

struct Theorem1Row {
  int m = 0;
  Rational forward;   // A0 with its 2^m shifts along +S and +T
  Rational backward;  // A0 with its 2^m shifts along -S and -T
  bool pair1_nontrivial = false;  // chi * S^{2^m} chi
  bool pair2_nontrivial = false;  // S^{2^m} chi * T^{2^m} chi
};

struct Theorem1Report {
  Character chi;
  Rational measure;  // mu(A0)
  std::vector<Theorem1Row> rows;
  /// Smallest m from which every backward value equals 1/8.
  std::optional<int> backward_threshold;
  bool pass = false;
};

/// Forward vanishing / backward product structure for A0 = {chi = -1}, m = 1..m_max.
/// Throws PreconditionError for trivial chi or m_max < 1.
Theorem1Report theorem1_certificate(const Character& chi, int m_max);

}  // namespace asym
