#pragma once

// Multi-correlations mu{x : T^{-k_i} x in A_i for all i} of level sets.
//
// For x at level q >= max k of the stage-J tower, T^{-k}x sits at level q - k,
// so the exact part of the answer is a count of levels q with q - k_i in A_i.
// Stage-J towers quickly outgrow memory (heights reach 10^17), so the count is
// taken on the grammar of the construction instead of a flat bit vector: the
// stage-t level string is copies of the stage-(t-1) string separated by spacer
// runs, and a count over a window of stage t splits into counts over windows of
// stage t-1. Repeated sub-queries are memoized. Stages small enough to hold as
// bit vectors are counted directly by the word kernels.

#include "asymlab/rank_one.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace asym {

struct CorrelationItem {
  std::reference_wrapper<const LevelSet> set;
  std::int64_t shift = 0;
};

enum class EngineMode {
  kAuto,          // flat below flat_cap levels, recursive above
  kFlat,          // one bit vector per set at stage J
  kHierarchical,  // recurse all the way down to the sets' own stage
};

struct EngineStats {
  std::uint64_t memo_entries = 0;
  std::uint64_t kernel_calls = 0;
};

struct EngineOptions {
  EngineMode mode = EngineMode::kAuto;
  std::int64_t flat_cap = std::int64_t{1} << 20;
  std::int64_t level_cap = kDefaultLevelCap;
  bool parallel = true;
  EngineStats* stats = nullptr;
};

/// #{q in [lo, hi) : 0 <= q - k_i < h_J and level q - k_i of stage J is in A_i for all i}.
std::int64_t count_shifted_levels(const Tower& tower, std::span<const CorrelationItem> items, int J, std::int64_t lo,
                                  std::int64_t hi, const EngineOptions& options = {});

/// value counts stage-J levels q >= spread; bound covers the levels below spread
/// and, for sets with the exterior flag, the mass outside the stage-J tower.
/// mu(A n T^k B n T^m C) = certified_correlation({{A, 0}, {B, k}, {C, m}}, J).
/// Throws PreconditionError if spread >= h_J, J is below an input's stage, or the
/// bound would be infinite.
CertifiedMeasure certified_correlation(const Tower& tower, std::span<const CorrelationItem> items, int J,
                                       const EngineOptions& options = {});

inline CertifiedMeasure certified_correlation(const Tower& tower, std::initializer_list<CorrelationItem> items, int J,
                                              const EngineOptions& options = {}) {
  return certified_correlation(tower, std::span<const CorrelationItem>(items.begin(), items.size()), J, options);
}

}  // namespace asym
