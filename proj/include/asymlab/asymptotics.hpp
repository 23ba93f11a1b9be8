#pragma once

// Finite-stage evidence for the limit identities of the block constructions.
//
// Stage j of a block plan with parameter N has the column relations
// T^g B1 = B2, T^(g+2N) B2 = B3, T^(g+N) B3 ~ B1 with g = h_j + H_j. Along
// n_j = g + N the triple correlation mu(A n T^(n+N) B n T^(2n) C) approaches the
// average of three short-shift correlations, one per column type. Each table
// row compares the two sides as certified intervals at depth J = j + depth,
// clamped to the deepest built stage; stages left with J < j + 2 are skipped.
//
// Finite plans report measures normalized by the total; infinite plans report
// raw measures.

#include "asymlab/correlation_engine.hpp"
#include "asymlab/rank_one.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace asym {

struct ConvergenceRow {
  int j = 0;
  int eval_stage = 0;  // J actually used
  std::int64_t h_j = 0;
  std::int64_t n_j = 0;
  std::int64_t k = 0;
  std::int64_t m = 0;
  CertifiedMeasure lhs;
  CertifiedMeasure rhs;
  Rational gap;        // distance between the two intervals, 0 if they meet
  Rational gap_upper;  // certified bound on |lhs - rhs|
};

struct TableOptions {
  int first_stage = 3;
  int last_stage = 8;
  int depth = 6;
  EngineOptions engine;
};

/// Rows for stages in [first, last] whose block parameter equals N.
/// Throws PreconditionError if no stage qualifies or a set is deeper than the first stage.
std::vector<ConvergenceRow> theorem2_table(const Tower& tower, std::int64_t N, const LevelSet& A, const LevelSet& B,
                                           const LevelSet& C, const TableOptions& options = {});

/// lhs = mu(A n T^-(n+N) B n T^-2n C);
/// rhs = (mu(A n B n T^N C) + mu(A n T^-N B n T^-N C) + mu(A n T^-2N B n C)) / 3.
std::vector<ConvergenceRow> backward_table(const Tower& tower, std::int64_t N, const LevelSet& A, const LevelSet& B,
                                           const LevelSet& C, const TableOptions& options = {});

/// Stages with N = 1: lhs = mu(A n T^n B), rhs = (mu(A n B) + mu(A n T B) + mu(A n T^-1 B)) / 3.
std::vector<ConvergenceRow> weak_limit_check(const Tower& tower, const LevelSet& A, const LevelSet& B,
                                             const TableOptions& options = {});

struct TableVerdict {
  bool narrowed = false;      // final gap_upper <= first gap_upper
  bool within = false;        // final gap_upper <= tolerance
  bool pass() const { return narrowed && within; }
};
TableVerdict judge_table(std::span<const ConvergenceRow> rows, const Rational& tolerance);

struct SetTriple {
  std::reference_wrapper<const LevelSet> a;
  std::reference_wrapper<const LevelSet> b;
  std::reference_wrapper<const LevelSet> c;
};

struct MixingTime {
  std::int64_t N = 0;
  Rational score;
};

/// Score of N: the largest certified deviation, over all probe triples, of
///   mu(A n T^N B n T^-N C), mu(A n T^2N B n T^N C)   from mu(A)mu(B)mu(C),
///   mu(A n B n T^N C)                               from mu(A n B)mu(C),
///   mu(A n T^-N B n T^-N C)                         from mu(B n C)mu(A),
///   mu(A n T^-2N B n C)                             from mu(A n C)mu(B),
/// with every target 0 for infinite plans. Sorted by score, then N.
std::vector<MixingTime> find_mixing_times(const Tower& tower, std::span<const SetTriple> probes,
                                          std::span<const std::int64_t> candidates, int J,
                                          const EngineOptions& engine = {});

struct AsymmetryRow {
  int j = 0;
  int eval_stage = 0;
  std::int64_t h_j = 0;
  std::int64_t n_j = 0;
  std::int64_t N = 0;
  std::int64_t k = 0;
  std::int64_t m = 0;
  CertifiedMeasure forward;   // mu(A n T^k B n T^m C)
  CertifiedMeasure backward;  // mu(A n T^-k B n T^-m C)
};

struct AsymmetryOptions {
  int first_stage = 4;
  int last_stage = 12;
  int depth = 6;
  /// Mixing-time candidates; empty means every block parameter used in the stage window.
  std::vector<std::int64_t> candidates;
  /// Allowed deviation of each final value from its target (absolute; times mu(A) for infinite plans).
  Rational tolerance{3, 200};
  /// Infinite plans only: allowed mu(A n T^N A) as a multiple of mu(A).
  Rational pairwise_tolerance{1, 50};
  EngineOptions engine;
};

struct AsymmetryReport {
  bool finite = true;
  Rational measure_a;  // normalized for finite plans
  Rational forward_target;
  Rational backward_target;
  std::int64_t mixing_time = 0;
  std::vector<MixingTime> mixing_scores;
  std::vector<AsymmetryRow> rows;
  Rational forward_deviation;   // final row, certified bound on |forward - target|
  Rational backward_deviation;
  Rational separation;          // certified lower bound on forward - backward at the final row
  std::optional<CertifiedMeasure> pairwise;  // mu(A n T^N A), infinite plans
  bool pass = false;
};

/// Finite plans. Targets (2/3)p^3 + (1/3)p forward and p^2 backward for p = mu(A).
AsymmetryReport theorem3_run(const Tower& tower, const LevelSet& A, const AsymmetryOptions& options = {});

/// Three-set form: targets (2/3)mu(A)mu(B)mu(C) + (1/3)mu(A n B n C) forward and
/// (mu(A n B)mu(C) + mu(B n C)mu(A) + mu(A n C)mu(B)) / 3 backward.
AsymmetryReport theorem3_run(const Tower& tower, const LevelSet& A, const LevelSet& B, const LevelSet& C,
                             const AsymmetryOptions& options = {});

/// Infinite plans, raw measures. Targets mu(A)/3 forward and 0 backward.
AsymmetryReport theorem4_run(const Tower& tower, const LevelSet& A, const AsymmetryOptions& options = {});

/// Each level of the stage independently with probability 1/2 (Philox stream `stream` of `seed`).
LevelSet random_level_set(const Tower& tower, int stage, std::uint64_t seed, std::uint64_t stream);

/// Uniformly random set of round(p * total / w_stage) levels; finite plans only.
LevelSet random_level_set_with_measure(const Tower& tower, int stage, const Rational& p, std::uint64_t seed,
                                       std::uint64_t stream);

/// CSV with columns j, h_j, n_j, k, m, lhs_lo, lhs_hi, rhs, gap, verdict, then
/// eval_stage, gap_upper and float copies. Rationals as "p/q".
void write_table_csv(std::ostream& out, std::span<const ConvergenceRow> rows, const Rational& tolerance);
void write_asymmetry_csv(std::ostream& out, const AsymmetryReport& report);

nlohmann::json table_summary(std::span<const ConvergenceRow> rows, const Rational& tolerance);
nlohmann::json asymmetry_summary(const AsymmetryReport& report);

}  // namespace asym
