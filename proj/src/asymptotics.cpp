#include "asymlab/asymptotics.hpp"

#include "asymlab/philox.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace asym {

namespace {

Rational normalizer(const Tower& tower) {
  return tower.finite() ? Rational(1) / *tower.total_measure() : Rational(1);
}

CertifiedMeasure corr(const Tower& tower, std::initializer_list<CorrelationItem> items, int J,
                      const EngineOptions& engine) {
  return certified_correlation(tower, items, J, engine).scaled(normalizer(tower));
}

CertifiedMeasure operator+(const CertifiedMeasure& a, const CertifiedMeasure& b) {
  return {a.value + b.value, a.bound + b.bound};
}

Rational magnitude(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Certified bound on |x - target| for x in the interval.
Rational deviation(const CertifiedMeasure& x, const Rational& target) {
  return std::max(magnitude(x.value - target), magnitude(x.upper() - target));
}

void fill_gaps(ConvergenceRow& row) {
  const auto& a = row.lhs;
  const auto& b = row.rhs;
  row.gap = std::max({Rational(0), a.value - b.upper(), b.value - a.upper()});
  row.gap_upper = std::max(a.upper() - b.value, b.upper() - a.value);
}

Rational intersection_measure(const Tower& tower, const LevelSet& a, const LevelSet& b) {
  const int s = std::max(a.stage, b.stage);
  return measure(tower, set_intersection(refine(tower, a, s), refine(tower, b, s)));
}

int eval_stage(const Tower& tower, int j, int depth) { return std::min(j + depth, tower.top_stage()); }

// Stages whose evaluation depth had to be clamped below this are skipped: with
// J = j + 1 the unresolved levels below the shift spread are a few percent of the tower.
constexpr int kMinDepth = 2;

void check_stages(std::initializer_list<std::reference_wrapper<const LevelSet>> sets, int first) {
  for (const auto& s : sets) {
    if (s.get().stage > first) throw PreconditionError("input sets must live at or above the first tested stage");
  }
}

using RowBuilder = std::function<void(ConvergenceRow&, int J)>;

std::vector<ConvergenceRow> build_table(const Tower& tower, std::int64_t N, const TableOptions& options,
                                        std::int64_t span_factor, const RowBuilder& fill) {
  std::vector<ConvergenceRow> rows;
  for (int j = options.first_stage; j <= std::min(options.last_stage, tower.top_stage()); ++j) {
    if (tower.spec(j).N != N || eval_stage(tower, j, options.depth) < j + kMinDepth) continue;
    ConvergenceRow row;
    row.j = j;
    row.eval_stage = eval_stage(tower, j, options.depth);
    row.h_j = tower.height(j);
    row.n_j = mixing_sequence_n(tower, j);
    if (span_factor * row.n_j + N >= tower.height(row.eval_stage)) continue;
    fill(row, row.eval_stage);
    fill_gaps(row);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw PreconditionError("no stage in the window has block parameter " + std::to_string(N));
  return rows;
}

}  // namespace

std::vector<ConvergenceRow> theorem2_table(const Tower& tower, std::int64_t N, const LevelSet& A, const LevelSet& B,
                                           const LevelSet& C, const TableOptions& options) {
  check_stages({A, B, C}, options.first_stage);
  const auto& eng = options.engine;
  return build_table(tower, N, options, 2, [&](ConvergenceRow& row, int J) {
    row.k = row.n_j + N;
    row.m = 2 * row.n_j;
    row.lhs = corr(tower, {{A, 0}, {B, row.k}, {C, row.m}}, J, eng);
    const auto sum = corr(tower, {{A, 0}, {B, N}, {C, -N}}, J, eng) + corr(tower, {{A, 0}, {B, 2 * N}, {C, N}}, J, eng) +
                     corr(tower, {{A, 0}, {B, 0}, {C, 0}}, J, eng);
    row.rhs = sum.scaled(Rational(1, 3));
  });
}

std::vector<ConvergenceRow> backward_table(const Tower& tower, std::int64_t N, const LevelSet& A, const LevelSet& B,
                                           const LevelSet& C, const TableOptions& options) {
  check_stages({A, B, C}, options.first_stage);
  const auto& eng = options.engine;
  return build_table(tower, N, options, 2, [&](ConvergenceRow& row, int J) {
    row.k = -(row.n_j + N);
    row.m = -2 * row.n_j;
    row.lhs = corr(tower, {{A, 0}, {B, row.k}, {C, row.m}}, J, eng);
    const auto sum = corr(tower, {{A, 0}, {B, 0}, {C, N}}, J, eng) + corr(tower, {{A, 0}, {B, -N}, {C, -N}}, J, eng) +
                     corr(tower, {{A, 0}, {B, -2 * N}, {C, 0}}, J, eng);
    row.rhs = sum.scaled(Rational(1, 3));
  });
}

std::vector<ConvergenceRow> weak_limit_check(const Tower& tower, const LevelSet& A, const LevelSet& B,
                                             const TableOptions& options) {
  check_stages({A, B}, options.first_stage);
  const auto& eng = options.engine;
  return build_table(tower, 1, options, 1, [&](ConvergenceRow& row, int J) {
    row.k = row.n_j;
    row.m = 0;
    row.lhs = corr(tower, {{A, 0}, {B, row.n_j}}, J, eng);
    const auto sum =
        corr(tower, {{A, 0}, {B, 0}}, J, eng) + corr(tower, {{A, 0}, {B, 1}}, J, eng) + corr(tower, {{A, 0}, {B, -1}}, J, eng);
    row.rhs = sum.scaled(Rational(1, 3));
  });
}

TableVerdict judge_table(std::span<const ConvergenceRow> rows, const Rational& tolerance) {
  TableVerdict v;
  if (rows.empty()) return v;
  v.narrowed = rows.back().gap_upper <= rows.front().gap_upper;
  v.within = rows.back().gap_upper <= tolerance;
  return v;
}

std::vector<MixingTime> find_mixing_times(const Tower& tower, std::span<const SetTriple> probes,
                                          std::span<const std::int64_t> candidates, int J,
                                          const EngineOptions& engine) {
  if (candidates.empty()) throw PreconditionError("empty mixing-time candidate list");
  if (probes.empty()) throw PreconditionError("no probe triples");
  if (J < 1 || J > tower.top_stage()) throw PreconditionError("mixing-time stage is not built");
  const std::int64_t limit = tower.height(J - 1) / 4;
  const Rational norm = normalizer(tower);
  std::vector<MixingTime> out;
  for (const std::int64_t N : candidates) {
    if (N < 1 || N > limit) throw PreconditionError("mixing-time candidate outside [1, h_(J-1)/4]");
    Rational score = 0;
    for (const auto& t : probes) {
      const LevelSet &A = t.a, &B = t.b, &C = t.c;
      const bool fin = tower.finite();
      const Rational a = fin ? measure(tower, A) * norm : Rational(0);
      const Rational b = fin ? measure(tower, B) * norm : Rational(0);
      const Rational c = fin ? measure(tower, C) * norm : Rational(0);
      auto dev = [&](std::initializer_list<CorrelationItem> items, const Rational& target) {
        score = std::max(score, deviation(corr(tower, items, J, engine), target));
      };
      dev({{A, 0}, {B, N}, {C, -N}}, a * b * c);
      dev({{A, 0}, {B, 2 * N}, {C, N}}, a * b * c);
      // Short-shift terms of the backward limit; each splits into a pair and a single set.
      dev({{A, 0}, {B, 0}, {C, N}}, fin ? intersection_measure(tower, A, B) * norm * c : Rational(0));
      dev({{A, 0}, {B, -N}, {C, -N}}, fin ? intersection_measure(tower, B, C) * norm * a : Rational(0));
      dev({{A, 0}, {B, -2 * N}, {C, 0}}, fin ? intersection_measure(tower, A, C) * norm * b : Rational(0));
    }
    out.push_back({N, score});
  }
  std::stable_sort(out.begin(), out.end(), [](const MixingTime& a, const MixingTime& b) {
    return a.score != b.score ? a.score < b.score : a.N < b.N;
  });
  return out;
}

namespace {

std::vector<std::int64_t> window_candidates(const Tower& tower, const AsymmetryOptions& options) {
  if (!options.candidates.empty()) return options.candidates;
  std::set<std::int64_t> ns;
  for (int j = options.first_stage; j <= std::min(options.last_stage, tower.top_stage()); ++j) ns.insert(tower.spec(j).N);
  return {ns.begin(), ns.end()};
}

// Mixing-time selection and the forward/backward rows shared by both runs.
void run_rows(const Tower& tower, const LevelSet& A, const LevelSet& B, const LevelSet& C,
              const AsymmetryOptions& options, AsymmetryReport& report) {
  check_stages({A, B, C}, options.first_stage);
  const auto candidates = window_candidates(tower, options);
  const SetTriple probe{A, B, C};
  const int probe_stage = eval_stage(tower, options.first_stage, options.depth);
  report.mixing_scores =
      find_mixing_times(tower, std::span(&probe, 1), candidates, probe_stage, options.engine);
  report.mixing_time = report.mixing_scores.front().N;
  const std::int64_t N = report.mixing_time;

  for (int j = options.first_stage; j <= std::min(options.last_stage, tower.top_stage()); ++j) {
    if (tower.spec(j).N != N || eval_stage(tower, j, options.depth) < j + kMinDepth) continue;
    AsymmetryRow row;
    row.j = j;
    row.eval_stage = eval_stage(tower, j, options.depth);
    row.h_j = tower.height(j);
    row.n_j = mixing_sequence_n(tower, j);
    row.N = N;
    row.k = row.n_j + N;
    row.m = 2 * row.n_j;
    if (row.m >= tower.height(row.eval_stage)) continue;
    row.forward = corr(tower, {{A, 0}, {B, row.k}, {C, row.m}}, row.eval_stage, options.engine);
    row.backward = corr(tower, {{A, 0}, {B, -row.k}, {C, -row.m}}, row.eval_stage, options.engine);
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) throw PreconditionError("no stage in the window uses the selected mixing time");
  const auto& last = report.rows.back();
  report.forward_deviation = deviation(last.forward, report.forward_target);
  report.backward_deviation = deviation(last.backward, report.backward_target);
  report.separation = last.forward.value - last.backward.upper();
}

}  // namespace

AsymmetryReport theorem3_run(const Tower& tower, const LevelSet& A, const LevelSet& B, const LevelSet& C,
                             const AsymmetryOptions& options) {
  if (!tower.finite()) throw PreconditionError("theorem3_run needs a finite-measure plan");
  const Rational norm = normalizer(tower);
  const Rational a = measure(tower, A) * norm, b = measure(tower, B) * norm, c = measure(tower, C) * norm;
  const int s = std::max({A.stage, B.stage, C.stage});
  const Rational abc =
      measure(tower, set_intersection(set_intersection(refine(tower, A, s), refine(tower, B, s)), refine(tower, C, s))) *
      norm;
  const Rational ab = intersection_measure(tower, A, B) * norm;
  const Rational bc = intersection_measure(tower, B, C) * norm;
  const Rational ac = intersection_measure(tower, A, C) * norm;

  AsymmetryReport report;
  report.finite = true;
  report.measure_a = a;
  report.forward_target = Rational(2, 3) * a * b * c + abc / 3;
  report.backward_target = (ab * c + bc * a + ac * b) / 3;
  run_rows(tower, A, B, C, options, report);
  report.pass = report.forward_deviation <= options.tolerance && report.backward_deviation <= options.tolerance;
  return report;
}

AsymmetryReport theorem3_run(const Tower& tower, const LevelSet& A, const AsymmetryOptions& options) {
  return theorem3_run(tower, A, A, A, options);
}

AsymmetryReport theorem4_run(const Tower& tower, const LevelSet& A, const AsymmetryOptions& options) {
  if (tower.finite()) throw PreconditionError("theorem4_run needs an infinite-measure plan");
  AsymmetryReport report;
  report.finite = false;
  report.measure_a = measure(tower, A);
  report.forward_target = report.measure_a / 3;
  report.backward_target = 0;
  run_rows(tower, A, A, A, options, report);
  const int J = report.rows.back().eval_stage;
  report.pairwise = corr(tower, {{A, 0}, {A, report.mixing_time}}, J, options.engine);
  const Rational allowed = options.tolerance * report.measure_a;
  report.pass = report.forward_deviation <= allowed && report.backward_deviation <= allowed &&
                report.pairwise->upper() <= options.pairwise_tolerance * report.measure_a;
  return report;
}

LevelSet random_level_set(const Tower& tower, int stage, std::uint64_t seed, std::uint64_t stream) {
  LevelSet a = LevelSet::none(tower, stage);
  Philox4x32 rng(seed, stream);
  for (auto& w : a.levels.words()) w = rng.next64();
  a.levels.resize(a.levels.size());
  return a;
}

LevelSet random_level_set_with_measure(const Tower& tower, int stage, const Rational& p, std::uint64_t seed,
                                       std::uint64_t stream) {
  if (!tower.finite()) throw PreconditionError("normalized measure needs a finite plan");
  if (p < 0 || p > 1) throw PreconditionError("measure must lie in [0, 1]");
  const std::int64_t h = tower.height(stage);
  const Rational want = p * *tower.total_measure() / tower.width(stage);
  BigInt count = boost::multiprecision::numerator(want + Rational(1, 2)) / boost::multiprecision::denominator(want + Rational(1, 2));
  if (count > h) count = h;
  const auto n = static_cast<std::int64_t>(count);
  std::vector<std::int64_t> levels(static_cast<std::size_t>(h));
  for (std::int64_t i = 0; i < h; ++i) levels[static_cast<std::size_t>(i)] = i;
  Philox4x32 rng(seed, stream);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto r = i + static_cast<std::int64_t>(rng.next64() % static_cast<std::uint64_t>(h - i));
    std::swap(levels[static_cast<std::size_t>(i)], levels[static_cast<std::size_t>(r)]);
  }
  levels.resize(static_cast<std::size_t>(n));
  return LevelSet::of_levels(tower, stage, levels);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string fmt(const Rational& r) { return fmt(to_double(r)); }

nlohmann::json interval_json(const CertifiedMeasure& m) {
  return {{"value", to_string(m.value)}, {"bound", to_string(m.bound)}, {"lo", to_double(m.value)}, {"hi", to_double(m.upper())}};
}

}  // namespace

void write_table_csv(std::ostream& out, std::span<const ConvergenceRow> rows, const Rational& tolerance) {
  out << "j,h_j,n_j,k,m,lhs_lo,lhs_hi,rhs,gap,verdict,eval_stage,rhs_bound,gap_upper,"
         "lhs_lo_f,lhs_hi_f,rhs_f,gap_f,gap_upper_f\n";
  for (const auto& r : rows) {
    out << r.j << ',' << r.h_j << ',' << r.n_j << ',' << r.k << ',' << r.m << ',' << to_string(r.lhs.value) << ','
        << to_string(r.lhs.upper()) << ',' << to_string(r.rhs.value) << ',' << to_string(r.gap) << ','
        << (r.gap_upper <= tolerance ? "PASS" : "FAIL") << ',' << r.eval_stage << ',' << to_string(r.rhs.bound) << ','
        << to_string(r.gap_upper) << ',' << fmt(r.lhs.value) << ',' << fmt(r.lhs.upper()) << ',' << fmt(r.rhs.value)
        << ',' << fmt(r.gap) << ',' << fmt(r.gap_upper) << '\n';
  }
}

void write_asymmetry_csv(std::ostream& out, const AsymmetryReport& report) {
  out << "j,h_j,n_j,N,k,m,forward_lo,forward_hi,backward_lo,backward_hi,forward_target,backward_target,eval_stage,"
         "forward_lo_f,forward_hi_f,backward_lo_f,backward_hi_f\n";
  for (const auto& r : report.rows) {
    out << r.j << ',' << r.h_j << ',' << r.n_j << ',' << r.N << ',' << r.k << ',' << r.m << ','
        << to_string(r.forward.value) << ',' << to_string(r.forward.upper()) << ',' << to_string(r.backward.value)
        << ',' << to_string(r.backward.upper()) << ',' << to_string(report.forward_target) << ','
        << to_string(report.backward_target) << ',' << r.eval_stage << ',' << fmt(r.forward.value) << ','
        << fmt(r.forward.upper()) << ',' << fmt(r.backward.value) << ',' << fmt(r.backward.upper()) << '\n';
  }
}

nlohmann::json table_summary(std::span<const ConvergenceRow> rows, const Rational& tolerance) {
  const auto v = judge_table(rows, tolerance);
  nlohmann::json j{{"rows", rows.size()}, {"narrowed", v.narrowed}, {"within_tolerance", v.within},
                   {"verdict", v.pass() ? "PASS" : "FAIL"}};
  if (!rows.empty()) {
    j["first_gap_upper"] = to_string(rows.front().gap_upper);
    j["final_gap_upper"] = to_string(rows.back().gap_upper);
    j["final_gap_upper_f"] = to_double(rows.back().gap_upper);
    j["final_lhs"] = interval_json(rows.back().lhs);
    j["final_rhs"] = interval_json(rows.back().rhs);
  }
  return j;
}

nlohmann::json asymmetry_summary(const AsymmetryReport& report) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : report.mixing_scores) scores.push_back({{"N", s.N}, {"score", to_string(s.score)}, {"score_f", to_double(s.score)}});
  nlohmann::json j{{"measure_normalized", report.finite},
                   {"measure_a", to_string(report.measure_a)},
                   {"measure_a_f", to_double(report.measure_a)},
                   {"mixing_time", report.mixing_time},
                   {"mixing_scores", std::move(scores)},
                   {"forward_target", to_string(report.forward_target)},
                   {"backward_target", to_string(report.backward_target)},
                   {"forward_deviation_f", to_double(report.forward_deviation)},
                   {"backward_deviation_f", to_double(report.backward_deviation)},
                   {"separation_f", to_double(report.separation)},
                   {"verdict", report.pass ? "PASS" : "FAIL"}};
  if (!report.rows.empty()) {
    j["final_forward"] = interval_json(report.rows.back().forward);
    j["final_backward"] = interval_json(report.rows.back().backward);
  }
  if (report.pairwise) j["pairwise"] = interval_json(*report.pairwise);
  return j;
}

}  // namespace asym
