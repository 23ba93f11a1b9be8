#include "asymlab/gf2_dual.hpp"
#include "asymlab/ledrappier.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace asym;

namespace {

LaurentPoly2 P(std::vector<Exponent> terms) { return LaurentPoly2::from_terms(std::move(terms)); }

LaurentPoly2 random_poly(std::mt19937_64& rng, int max_terms, int span) {
  std::uniform_int_distribution<int> count(1, max_terms), e(-span, span);
  std::vector<Exponent> terms;
  for (int i = count(rng); i > 0; --i) terms.push_back({e(rng), e(rng)});
  return P(terms);
}

LaurentPoly2 power_by_squaring(LaurentPoly2 p, int m) {
  for (int i = 0; i < m; ++i) p = poly_mul(p, p);
  return p;
}

}  // namespace

TEST_CASE("poly_add is symmetric difference") {
  CHECK(poly_add(P({{0, 0}}), P({{0, 0}})).is_zero());
  CHECK(poly_add(P({{0, 0}, {1, 0}}), P({{1, 0}, {0, 1}})) == P({{0, 0}, {0, 1}}));
  CHECK(poly_add(LaurentPoly2::relation(), P({{0, 0}, {1, 0}})) == P({{0, 1}}));
  CHECK(P({{2, 3}, {2, 3}}).is_zero());
}

TEST_CASE("poly_mul") {
  const auto r = LaurentPoly2::relation();
  CHECK(poly_mul(r, r) == P({{0, 0}, {2, 0}, {0, 2}}));
  CHECK(poly_mul(r, LaurentPoly2{}).is_zero());
  CHECK(poly_mul(r, P({{0, 0}})) == r);
}

TEST_CASE("monomial_shift") {
  CHECK(monomial_shift(P({{0, 0}}), 4, 0) == P({{4, 0}}));
  CHECK(monomial_shift(LaurentPoly2::relation(), 0, -1) == P({{0, -1}, {1, -1}, {0, 0}}));
  CHECK(monomial_shift(LaurentPoly2::relation(), 0, 0) == LaurentPoly2::relation());
}

TEST_CASE("reduce_mod_relation examples") {
  CHECK(reduce_mod_relation(LaurentPoly2::relation()).is_zero());
  for (int m = 0; m <= 12; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    CHECK(reduce_mod_relation(P({{0, 0}, {n, 0}, {0, n}})).is_zero());
  }
  const auto one = reduce_mod_relation(P({{0, 0}}));
  CHECK(one.numerator == Gf2Poly::monomial(0));
  CHECK(one.pole_order_x == 0);
  CHECK(one.pole_order_x1 == 0);

  for (int m = 1; m <= 6; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    const auto r = reduce_mod_relation(P({{n, 0}, {0, n}, {n, n}}));
    const std::vector<std::uint64_t> e{0, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(2 * n)};
    CHECK(r.numerator == Gf2Poly::from_exponents(e));
  }
}

TEST_CASE("reduced form is canonical and agrees with the naive zero test") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 400; ++i) {
    const auto p = random_poly(rng, 6, 5);
    const auto r = reduce_mod_relation(p);
    CHECK(r.is_zero() == oracle::vanishes_on_relation(p));
    if (!r.is_zero()) {
      CHECK(r.numerator.coeff(0));
      CHECK(oracle::one_plus_x_multiplicity(r.numerator) == 0);
    }
    // Multiples of the relation always vanish.
    CHECK(reduce_mod_relation(poly_mul(p, LaurentPoly2::relation())).is_zero());
  }
}

TEST_CASE("reduction is a ring homomorphism") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_poly(rng, 5, 4);
    const auto q = random_poly(rng, 5, 4);
    const auto rp = reduce_mod_relation(p), rq = reduce_mod_relation(q);
    CHECK(reduce_mod_relation(poly_add(p, q)) == rp + rq);
    CHECK(reduce_mod_relation(poly_mul(p, q)) == rp * rq);
  }
}

TEST_CASE("Frobenius identity in the polynomial ring") {
  for (int m = 0; m <= 12; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    const auto p = power_by_squaring(LaurentPoly2::relation(), m);
    CHECK(p == P({{0, 0}, {n, 0}, {0, n}}));
    CHECK(reduce_mod_relation(p).is_zero());
  }
}

TEST_CASE("triviality and integrals") {
  CHECK(is_trivial_on_group({LaurentPoly2::relation()}));
  CHECK_FALSE(is_trivial_on_group({P({{0, 0}})}));
  CHECK(is_trivial_on_group({LaurentPoly2{}}));
  CHECK(character_integral({LaurentPoly2{}}) == 1);
  CHECK(character_integral({P({{0, 0}})}) == 0);
  const Character chi{P({{0, 0}, {1, 2}, {-1, 1}})};
  for (int m = 1; m <= 10; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    CHECK(character_integral(chi * chi.shifted(0, n) * chi.shifted(n, 0)) == 1);
  }
}

TEST_CASE("triviality matches sampled constancy") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    const auto p = random_poly(rng, 4, 3);
    const bool trivial = is_trivial_on_group({p});
    // Evaluate the character on sampled configurations, shifted into the window.
    bool seen[2] = {false, false};
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      const auto w = sample_config(24, 8, seed);
      bool parity = false;
      for (const auto& e : p.support()) parity = parity != w.at(e.t + 4, e.s + 4);
      seen[parity ? 1 : 0] = true;
    }
    CHECK(trivial == (seen[0] != seen[1] && seen[0]));
  }
}

TEST_CASE("character set correlations") {
  const Character chi{P({{0, 0}})};
  CharacterSetTerm single{chi, {0, 0}, false};
  CHECK(character_set_correlation(std::span(&single, 1)) == Rational(1, 2));
  for (int m = 1; m <= 8; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    std::vector<CharacterSetTerm> fwd{{chi, {0, 0}}, {chi, {0, n}}, {chi, {n, 0}}};
    std::vector<CharacterSetTerm> bwd{{chi, {0, 0}}, {chi, {0, -n}}, {chi, {-n, 0}}};
    CHECK(character_set_correlation(fwd) == 0);
    CHECK(character_set_correlation(bwd) == Rational(1, 8));
    // Complement flips by inclusion-exclusion: mu(A n B n C') = mu(A n B) - mu(A n B n C).
    std::vector<CharacterSetTerm> fwd_c{{chi, {0, 0}}, {chi, {0, n}}, {chi, {n, 0}, true}};
    std::vector<CharacterSetTerm> pair{{chi, {0, 0}}, {chi, {0, n}}};
    CHECK(character_set_correlation(fwd_c) == character_set_correlation(pair));
  }
}

TEST_CASE("character set correlation equals enumeration") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    std::vector<CharacterSetTerm> terms;
    std::vector<ShiftedSet> sets;
    for (int k = 0; k < 3; ++k) {
      const Character chi{random_poly(rng, 3, 1)};
      const Exponent shift{static_cast<std::int64_t>(rng() % 3) - 1, static_cast<std::int64_t>(rng() % 3) - 1};
      terms.push_back({chi, shift});
      sets.push_back({CharacterSet{chi}, shift});
    }
    CHECK(character_set_correlation(terms) == oracle::enumerate_correlation(sets));
  }
}

TEST_CASE("min_mixing_threshold") {
  const Character chi{P({{0, 0}})};
  CHECK(min_mixing_threshold(chi, chi, chi, 12) == 1);
  // S^-2 chi * T^-2 chi makes the product trivial at m = 1 only.
  const Character crafted = chi.shifted(0, -2) * chi.shifted(-2, 0);
  CHECK(min_mixing_threshold(crafted, chi, chi, 12) == 2);
  const Character positive = chi.shifted(0, 2) * chi.shifted(2, 0);
  CHECK(min_mixing_threshold(positive, chi, chi, 12) == 1);
  CHECK_THROWS_AS(min_mixing_threshold({LaurentPoly2::relation()}, chi, chi, 4), PreconditionError);
  CHECK_THROWS_AS(min_mixing_threshold(chi, chi, chi, 0), PreconditionError);
  CHECK(shift_for(3, ShiftReading::kLinear) == 6);
  CHECK(shift_for(3, ShiftReading::kPowerOfTwo) == 8);
}

TEST_CASE("support literals") {
  const auto p = parse_support_literal(" [ (0,0), (1, 0),(0,1)] ");
  CHECK(p == LaurentPoly2::relation());
  CHECK(parse_support_literal(format_support_literal(p)) == p);
  CHECK(parse_support_literal("[]").is_zero());
  CHECK_THROWS_AS(parse_support_literal("[(0,0),(0,0)]"), ParseError);
  CHECK_THROWS_AS(parse_support_literal("[(0,0"), ParseError);
}
