#pragma once

// Rank-one transformations by cutting and stacking.
//
// Stage j is a tower of h_j levels of width w_j. To build stage j+1 the tower is
// cut into r_j equal columns; s_j[i] spacer levels go on top of column i and
// column i+1 is stacked on those spacers. Columns are laid out left to right, so
// column c's bottom lands at level base_offsets[c] = sum_{i<c} (h_j + s_j[i]).
//
// As an interval map: stage-0 level l is [l, l+1); column c of a stage-j level
// is its c-th subinterval; the spacers added at stage j+1 are fresh intervals
// taken in tower order from [mu_j, mu_{j+1}). T moves each non-top level onto
// the next one by translation.
//
// A plan lists finitely many stage specs; beyond the last one the last spec
// repeats forever. That tail fixes the limit measure: finite unless the last
// spec is "auto-height" (H_j = h_j).

#include "asymlab/bitvector.hpp"
#include "asymlab/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asym {

/// Spacer array (H, H+2N, H+N) repeated L times; H unset means H_j = h_j.
struct StageSpec {
  std::int64_t N = 1;
  std::int64_t L = 1;
  std::optional<std::int64_t> H = 0;

  bool auto_height() const { return !H.has_value(); }
  std::int64_t cuts() const { return 3 * L; }
  std::int64_t height_param(std::int64_t h) const { return H ? *H : h; }
  friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

struct SpacerPlan {
  std::int64_t h0 = 1;
  std::vector<StageSpec> stages;

  /// Throws ParseError on schema violations (including an empty stage list).
  static SpacerPlan from_json(const nlohmann::json& j);
  static SpacerPlan load(const std::string& path);
  nlohmann::json to_json() const;

  /// Block parameter N_j for each stage, L_j = j + 2 (or a fixed L), fixed H.
  static SpacerPlan blocks(std::span<const std::int64_t> n_per_stage, std::optional<std::int64_t> fixed_l = {},
                           std::optional<std::int64_t> h = 0, std::int64_t h0 = 1);
  /// N cycles over 1..n_max, L_j = j + 2, H = 0.
  static SpacerPlan cycling(std::int64_t n_max, int stage_count);

  friend bool operator==(const SpacerPlan&, const SpacerPlan&) = default;
};

/// s[3t] = H, s[3t+1] = H + 2N, s[3t+2] = H + N.
std::vector<std::int64_t> spacer_array(const StageSpec& spec, std::int64_t height);

enum class MeasureClass { kFinite, kInfinite };

struct TowerStage {
  int index = 0;
  std::int64_t height = 0;
  Rational width;
  Rational measure;  // height * width
  // Transition to stage index + 1; empty at the top built stage.
  StageSpec spec;
  std::vector<std::int64_t> spacers;
  std::vector<std::int64_t> base_offsets;
};

struct TowerLimits {
  int max_stage = 64;
  std::int64_t max_height = std::int64_t{1} << 62;
};

/// Default cap on levels of a materialized (bit-vector) level set.
inline constexpr std::int64_t kDefaultLevelCap = std::int64_t{1} << 28;

class Tower {
 public:
  /// Builds stages 0..J (the last listed spec repeats). Throws ResourceError past the limits.
  static Tower build(const SpacerPlan& plan, int J, const TowerLimits& limits = {});
  /// Builds as many stages as fit within the limits.
  static Tower build_max(const SpacerPlan& plan, const TowerLimits& limits = {});

  const SpacerPlan& plan() const { return plan_; }
  /// Spec used to go from stage j to stage j + 1.
  const StageSpec& spec(int j) const;
  int top_stage() const { return static_cast<int>(stages_.size()) - 1; }
  const TowerStage& stage(int j) const { return stages_.at(static_cast<std::size_t>(j)); }
  std::int64_t height(int j) const { return stage(j).height; }
  const Rational& width(int j) const { return stage(j).width; }

  MeasureClass measure_class() const { return class_; }
  bool finite() const { return class_ == MeasureClass::kFinite; }
  /// Limit measure of the whole space for finite plans.
  const std::optional<Rational>& total_measure() const { return total_; }

  /// Where level `pos` of stage t (t >= 1) comes from in stage t-1.
  struct Locus {
    bool spacer = false;
    std::int64_t column = 0;
    std::int64_t inner = 0;  // level in stage t-1, or index within the spacer run
  };
  Locus locate(int t, std::int64_t pos) const;

 private:
  static Tower build_impl(const SpacerPlan& plan, int J, const TowerLimits& limits, bool stop_quietly);

  SpacerPlan plan_;
  std::vector<TowerStage> stages_;
  MeasureClass class_ = MeasureClass::kFinite;
  std::optional<Rational> total_;
};

inline Tower build_tower(const SpacerPlan& plan, int J, const TowerLimits& limits = {}) {
  return Tower::build(plan, J, limits);
}

/// Union of levels of one stage; `exterior` adds everything outside that stage's tower.
struct LevelSet {
  int stage = 0;
  BitVector levels;
  bool exterior = false;

  static LevelSet none(const Tower& tower, int stage);
  static LevelSet whole(const Tower& tower, int stage);
  static LevelSet of_levels(const Tower& tower, int stage, std::span<const std::int64_t> levels);
  /// {"stage": j, "levels": [l, [lo, hi), ...], "exterior": false}
  static LevelSet from_json(const Tower& tower, const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t count() const { return levels.count(); }

  friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

LevelSet set_union(const LevelSet& a, const LevelSet& b);
LevelSet set_intersection(const LevelSet& a, const LevelSet& b);
LevelSet set_complement(const LevelSet& a);

/// Exact measure. Throws PreconditionError for an exterior set of an infinite plan.
Rational measure(const Tower& tower, const LevelSet& a);

/// The same set expressed by stage-J levels. Throws ResourceError if h_J exceeds level_cap.
LevelSet refine(const Tower& tower, const LevelSet& a, int J, std::int64_t level_cap = kDefaultLevelCap);

/// The true value lies in [value, value + bound].
struct CertifiedMeasure {
  Rational value;
  Rational bound;

  Rational upper() const { return value + bound; }
  bool contains(const Rational& x) const { return value <= x && x <= upper(); }
  bool overlaps(const CertifiedMeasure& o) const { return value <= o.upper() && o.value <= upper(); }
  CertifiedMeasure scaled(const Rational& f) const { return {value * f, bound * f}; }
};

/// n_j = h_j + H_j + N_j for the block structure of stage j.
std::int64_t mixing_sequence_n(const Tower& tower, int j);

/// Bottom levels of columns 3t, 3t+1, 3t+2 as singleton stage-(j+1) level sets.
struct ColumnBases {
  LevelSet first;
  LevelSet second;
  LevelSet third;
};
ColumnBases column_bases(const Tower& tower, int j, std::int64_t triple);

/// Stage-t level containing point p and p's offset inside it, or nullopt if p is
/// not in the stage-t tower.
struct PointLocus {
  std::int64_t level = 0;
  Rational offset;
};
std::optional<PointLocus> locate_point(const Tower& tower, const Rational& p, int t);

/// Left endpoint of level `pos` of stage t.
Rational level_left(const Tower& tower, int t, std::int64_t pos);

/// T^steps p, computed one step at a time. nullopt when a step would need a stage
/// deeper than max_stage (or p lies outside the built towers).
std::optional<Rational> orbit_point(const Tower& tower, const Rational& p, std::int64_t steps, int max_stage);

}  // namespace asym
