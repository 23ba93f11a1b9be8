#include "asymlab/correlation_engine.hpp"
#include "asymlab/rank_one.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace asym;

namespace {

SpacerPlan chacon_like() { return {1, {StageSpec{1, 1, 0}}}; }
SpacerPlan auto_height() { return {1, {StageSpec{1, 1, std::nullopt}}}; }

LevelSet random_set(const Tower& tower, int stage, std::mt19937_64& rng) {
  std::vector<std::int64_t> levels;
  for (std::int64_t l = 0; l < tower.height(stage); ++l) {
    if (rng() & 1) levels.push_back(l);
  }
  return LevelSet::of_levels(tower, stage, levels);
}

}  // namespace

TEST_CASE("heights, widths and measure classes") {
  const Tower t = Tower::build(chacon_like(), 5);
  const std::vector<std::int64_t> h{1, 6, 21, 66, 201, 606};
  for (int j = 0; j <= 5; ++j) {
    CHECK(t.height(j) == h[static_cast<std::size_t>(j)]);
    CHECK(t.width(j) == Rational(1, static_cast<long long>(std::pow(3, j))));
    CHECK(t.stage(j).measure == t.width(j) * t.height(j));
  }
  CHECK(t.finite());
  CHECK(*t.total_measure() == Rational(5, 2));

  const Tower inf = Tower::build(auto_height(), 3);
  CHECK(inf.height(1) == 9);
  CHECK(inf.height(2) == 57);
  CHECK(inf.height(3) == 345);
  CHECK_FALSE(inf.finite());
  CHECK_FALSE(inf.total_measure().has_value());

  CHECK_THROWS_AS(Tower::build(auto_height(), 40), ResourceError);
  CHECK(Tower::build_max(auto_height()).top_stage() > 10);
}

TEST_CASE("stacking recurrence") {
  const auto plan = SpacerPlan::blocks(std::vector<std::int64_t>{1, 2, 1, 3, 1});
  const Tower t = Tower::build(plan, 5);
  for (int j = 0; j < 5; ++j) {
    const auto& s = t.stage(j);
    std::int64_t spacers = 0;
    for (auto x : s.spacers) spacers += x;
    CHECK(static_cast<std::int64_t>(s.spacers.size()) == s.spec.cuts());
    CHECK(t.height(j + 1) == s.spec.cuts() * t.height(j) + spacers);
    CHECK(t.width(j + 1) * s.spec.cuts() == t.width(j));
    for (std::size_t c = 1; c < s.base_offsets.size(); ++c) {
      CHECK(s.base_offsets[c] == s.base_offsets[c - 1] + t.height(j) + s.spacers[c - 1]);
    }
  }
  CHECK(spacer_array({2, 2, 5}, 0) == std::vector<std::int64_t>{5, 9, 7, 5, 9, 7});
}

TEST_CASE("plan json") {
  const auto plan = SpacerPlan::cycling(3, 6);
  CHECK(SpacerPlan::from_json(plan.to_json()) == plan);
  CHECK(SpacerPlan::from_json(auto_height().to_json()) == auto_height());
  CHECK_THROWS_AS(SpacerPlan::from_json(nlohmann::json{{"h0", 1}, {"stages", nlohmann::json::array()}}), ParseError);
  CHECK_THROWS_AS(SpacerPlan::from_json(nlohmann::json{{"stages", {{{"N", 0}, {"L", 1}, {"H", 0}}}}}), ParseError);
}

TEST_CASE("refinement") {
  const Tower t = Tower::build(chacon_like(), 4);
  const std::vector<std::int64_t> zero{0};
  const auto a = LevelSet::of_levels(t, 0, zero);
  const auto r = refine(t, a, 1);
  CHECK(r.count() == 3);
  CHECK(r.levels.test(0));
  CHECK(r.levels.test(1));
  CHECK(r.levels.test(4));

  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_set(t, 1, rng);
    // Measure conservation and path independence.
    CHECK(measure(t, refine(t, s, 4)) == measure(t, s));
    CHECK(refine(t, refine(t, s, 2), 4) == refine(t, s, 4));
    const auto u = random_set(t, 2, rng);
    const auto s2 = refine(t, s, 2);
    CHECK(measure(t, set_union(s2, u)) + measure(t, set_intersection(s2, u)) == measure(t, s) + measure(t, u));
    CHECK(measure(t, set_complement(s)) == *t.total_measure() - measure(t, s));
  }
  CHECK(measure(t, LevelSet::whole(t, 2)) == Rational(5, 2));
  CHECK_THROWS_AS(refine(t, a, 4, 10), ResourceError);

  const Tower inf = Tower::build(auto_height(), 3);
  CHECK_THROWS_AS(measure(inf, LevelSet::whole(inf, 1)), PreconditionError);
  CHECK(measure(inf, LevelSet::of_levels(inf, 2, std::vector<std::int64_t>{3})) == Rational(1, 9));
}

TEST_CASE("level set json") {
  const Tower t = Tower::build(chacon_like(), 3);
  const auto s = LevelSet::from_json(t, nlohmann::json::parse(R"({"stage": 2, "levels": [1, [4, 7]]})"));
  CHECK(s.count() == 4);
  CHECK(LevelSet::from_json(t, s.to_json()) == s);
  CHECK_THROWS(LevelSet::from_json(t, nlohmann::json::parse(R"({"stage": 2, "levels": [21]})")));
}

TEST_CASE("mixing sequence and column relations") {
  const Tower t = Tower::build(chacon_like(), 8);
  CHECK(mixing_sequence_n(t, 3) == 67);
  const auto two = SpacerPlan::blocks(std::vector<std::int64_t>{2, 2, 2, 2, 2, 2}, 1);
  CHECK(mixing_sequence_n(Tower::build(two, 3), 2) == Tower::build(two, 3).height(2) + 2);
  const Tower inf = Tower::build(auto_height(), 4);
  CHECK(mixing_sequence_n(inf, 2) == 115);

  const int j = 2;
  const auto bases = column_bases(t, j, 0);
  const std::int64_t g = t.height(j);
  Rational prev_gap = 1;
  for (int J = 4; J <= 8; J += 2) {
    const auto r1 = certified_correlation(t, {{bases.first, 0}, {bases.second, -g}}, J);
    const auto r2 = certified_correlation(t, {{bases.second, 0}, {bases.third, -(g + 2)}}, J);
    CHECK(r1.contains(t.width(j + 1)));
    CHECK(r2.contains(t.width(j + 1)));
    // T^(g+N) B3 ~ B1: the certified overlap grows towards mu(B1).
    const auto r3 = certified_correlation(t, {{bases.third, 0}, {bases.first, -(g + 1)}}, J);
    const Rational gap = t.width(j + 1) - r3.value;
    CHECK(gap <= prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("certified correlation examples") {
  const Tower t = Tower::build(chacon_like(), 6);
  const auto a = LevelSet::of_levels(t, 0, std::vector<std::int64_t>{0});
  const auto r = certified_correlation(t, {{a, 0}, {a, 1}}, 3);
  CHECK(r.value == Rational(9, 27));
  CHECK(r.bound == Rational(1, 27));
  CHECK(r.contains(Rational(1, 3)));
  // Exterior sets add the mass outside the stage-J tower.
  const auto whole = LevelSet::whole(t, 1);
  const auto w = certified_correlation(t, {{whole, 0}}, 4);
  CHECK(w.contains(Rational(5, 2)));
  CHECK(w.value == t.stage(4).measure);
  // No dynamics: exact.
  std::mt19937_64 rng(4);
  const auto s = random_set(t, 2, rng), u = random_set(t, 2, rng);
  const auto e = certified_correlation(t, {{s, 0}, {u, 0}}, 5);
  CHECK(e.bound == 0);
  CHECK(e.value == measure(t, set_intersection(s, u)));

  CHECK_THROWS_AS(certified_correlation(t, {{s, 0}}, 1), PreconditionError);
  const Tower inf = Tower::build(auto_height(), 5);
  const auto wi = LevelSet::whole(inf, 1);
  CHECK_THROWS_AS(certified_correlation(inf, {{wi, 0}, {wi, 1}}, 3), PreconditionError);
}

TEST_CASE("measure preservation") {
  const Tower t = Tower::build(chacon_like(), 9);
  std::mt19937_64 rng(8);
  const auto a = random_set(t, 2, rng);
  for (std::int64_t k : {-40, -3, 1, 17, 60}) {
    Rational prev = 1;
    for (int J = 5; J <= 9; J += 2) {
      const auto r = certified_correlation(t, {{a, k}}, J);
      CHECK(r.contains(measure(t, a)));
      CHECK(r.bound <= prev);
      prev = r.bound;
    }
  }
}

TEST_CASE("engine modes agree with the naive count") {
  const auto plan = SpacerPlan::blocks(std::vector<std::int64_t>{1, 2, 1, 1, 3, 1, 1});
  const Tower t = Tower::build(plan, 5);
  std::mt19937_64 rng(13);
  const int J = 5;
  const std::int64_t hJ = t.height(J);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_set(t, 1, rng), b = random_set(t, 2, rng), c = random_set(t, 3, rng);
    const std::int64_t k = static_cast<std::int64_t>(rng() % 400) - 200, m = static_cast<std::int64_t>(rng() % 400) - 200;
    const std::vector<CorrelationItem> items{{a, 0}, {b, k}, {c, m}};
    std::int64_t lo = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hJ));
    std::int64_t hi = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hJ));
    if (lo > hi) std::swap(lo, hi);
    EngineOptions flat, hier;
    flat.mode = EngineMode::kFlat;
    hier.mode = EngineMode::kHierarchical;
    const auto n_flat = count_shifted_levels(t, items, J, lo, hi, flat);
    CHECK(n_flat == count_shifted_levels(t, items, J, lo, hi, hier));
    const auto ra = refine(t, a, J), rb = refine(t, b, J), rc = refine(t, c, J);
    CHECK(n_flat == oracle::naive_shift_count({&ra.levels, &rb.levels, &rc.levels}, {0, k, m}, lo, hi));
  }
}

TEST_CASE("orbit points") {
  const Tower t = Tower::build(chacon_like(), 7);
  const Rational p = level_left(t, 4, 10) + t.width(4) / 3;
  const auto at = locate_point(t, p, 4);
  REQUIRE(at.has_value());
  CHECK(at->level == 10);
  CHECK(at->offset == t.width(4) / 3);
  CHECK(*orbit_point(t, p, 0, 7) == p);
  CHECK(*orbit_point(t, p, 1, 7) == level_left(t, 4, 11) + t.width(4) / 3);
  CHECK(*orbit_point(t, *orbit_point(t, p, 37, 7), -37, 7) == p);
  CHECK_FALSE(locate_point(t, Rational(3), 7).has_value());
  // From the top level of the deepest stage there is nowhere to go.
  CHECK_FALSE(orbit_point(t, level_left(t, 7, t.height(7) - 1), 1, 7).has_value());
}

TEST_CASE("orbit agrees with the level counter") {
  for (const auto& plan : {chacon_like(), auto_height()}) {
    const int j = 2, J = 5;
    const Tower t = Tower::build(plan, J + 2);
    std::mt19937_64 rng(31);
    const auto a = random_set(t, j, rng);
    const Rational span = t.stage(J).measure;
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
      const Rational p = span * Rational(2 * i + 1, 400);
      const std::int64_t k = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * t.height(j) + 1)) - t.height(j);
      const auto loc = locate_point(t, p, J);
      REQUIRE(loc.has_value());
      const std::vector<CorrelationItem> items{{a, k}};
      const auto engine = count_shifted_levels(t, items, J, loc->level, loc->level + 1);
      if (loc->level - k < 0 || loc->level - k >= t.height(J)) {
        CHECK(engine == 0);
        continue;
      }
      const auto y = orbit_point(t, p, -k, t.top_stage());
      REQUIRE(y.has_value());
      const auto in_j = locate_point(t, *y, j);
      const bool member = in_j ? a.levels.test(static_cast<std::size_t>(in_j->level)) : a.exterior;
      CHECK(engine == (member ? 1 : 0));
      ++compared;
    }
    CHECK(compared > 150);
  }
}
