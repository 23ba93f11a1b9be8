#include "asymlab/gf2_dual.hpp"

#include <algorithm>
#include <map>

namespace asym {

LaurentPoly2 LaurentPoly2::from_terms(std::vector<Exponent> terms) {
  std::sort(terms.begin(), terms.end());
  LaurentPoly2 p;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i;
    while (j < terms.size() && terms[j] == terms[i]) ++j;
    if ((j - i) % 2 == 1) p.support_.push_back(terms[i]);
    i = j;
  }
  return p;
}

LaurentPoly2 LaurentPoly2::relation() { return from_terms({{0, 0}, {1, 0}, {0, 1}}); }

std::string LaurentPoly2::to_string() const {
  if (support_.empty()) return "0";
  std::string s;
  for (const auto& e : support_) {
    if (!s.empty()) s += " + ";
    std::string term;
    if (e.t != 0) term += e.t == 1 ? "x" : "x^" + std::to_string(e.t);
    if (e.s != 0) term += e.s == 1 ? "y" : "y^" + std::to_string(e.s);
    s += term.empty() ? "1" : term;
  }
  return s;
}

LaurentPoly2 poly_add(const LaurentPoly2& p, const LaurentPoly2& q) {
  std::vector<Exponent> out;
  std::set_symmetric_difference(p.support().begin(), p.support().end(), q.support().begin(), q.support().end(),
                                std::back_inserter(out));
  return LaurentPoly2::from_terms(std::move(out));
}

LaurentPoly2 poly_mul(const LaurentPoly2& p, const LaurentPoly2& q) {
  std::vector<Exponent> terms;
  terms.reserve(p.size() * q.size());
  for (const auto& a : p.support()) {
    for (const auto& b : q.support()) terms.push_back({a.t + b.t, a.s + b.s});
  }
  return LaurentPoly2::from_terms(std::move(terms));
}

LaurentPoly2 monomial_shift(const LaurentPoly2& p, std::int64_t t, std::int64_t s) {
  std::vector<Exponent> terms = p.support();
  for (auto& e : terms) {
    e.t += t;
    e.s += s;
  }
  return LaurentPoly2::from_terms(std::move(terms));
}

void ReducedPoly::canonicalize() {
  if (numerator.is_zero()) {
    pole_order_x = 0;
    pole_order_x1 = 0;
    return;
  }
  pole_order_x -= static_cast<std::int64_t>(numerator.strip_x());
  pole_order_x1 -= static_cast<std::int64_t>(numerator.strip_one_plus_x());
}

namespace {

Gf2Poly lift(const ReducedPoly& a, std::int64_t px, std::int64_t p1) {
  Gf2Poly n = a.numerator * Gf2Poly::one_plus_x_pow(static_cast<std::uint64_t>(p1 - a.pole_order_x1));
  return n.shifted(static_cast<std::uint64_t>(px - a.pole_order_x));
}

}  // namespace

ReducedPoly operator+(const ReducedPoly& a, const ReducedPoly& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::int64_t px = std::max(a.pole_order_x, b.pole_order_x);
  const std::int64_t p1 = std::max(a.pole_order_x1, b.pole_order_x1);
  ReducedPoly r{lift(a, px, p1) + lift(b, px, p1), px, p1};
  r.canonicalize();
  return r;
}

ReducedPoly operator*(const ReducedPoly& a, const ReducedPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  ReducedPoly r{a.numerator * b.numerator, a.pole_order_x + b.pole_order_x, a.pole_order_x1 + b.pole_order_x1};
  r.canonicalize();
  return r;
}

ReducedPoly reduce_mod_relation(const LaurentPoly2& p) {
  if (p.is_zero()) return {};
  std::int64_t tmin = p.support().front().t, tmax = tmin;
  std::int64_t smin = p.support().front().s, smax = smin;
  for (const auto& e : p.support()) {
    tmin = std::min(tmin, e.t);
    tmax = std::max(tmax, e.t);
    smin = std::min(smin, e.s);
    smax = std::max(smax, e.s);
  }
  if (tmax - tmin > kMaxDegreeSpan || smax - smin > kMaxDegreeSpan) {
    throw ResourceError("Laurent polynomial exponent span exceeds 2^20");
  }
  // x^t y^s -> x^(t - tmin) (1+x)^(s - smin), times the common factor x^tmin (1+x)^smin.
  std::map<std::int64_t, Gf2Poly> by_s;
  for (const auto& e : p.support()) by_s[e.s].flip(static_cast<std::uint64_t>(e.t - tmin));
  Gf2Poly numerator;
  for (const auto& [s, xs] : by_s) {
    numerator += xs * Gf2Poly::one_plus_x_pow(static_cast<std::uint64_t>(s - smin));
  }
  ReducedPoly r{std::move(numerator), -tmin, -smin};
  r.canonicalize();
  return r;
}

bool is_trivial_on_group(const Character& chi) { return reduce_mod_relation(chi.poly).is_zero(); }

Rational character_integral(const Character& chi) { return is_trivial_on_group(chi) ? Rational(1) : Rational(0); }

Rational character_set_correlation(std::span<const CharacterSetTerm> terms) {
  const std::size_t k = terms.size();
  if (k == 0 || k > 20) throw PreconditionError("character_set_correlation needs 1..20 sets");
  std::vector<LaurentPoly2> shifted;
  shifted.reserve(k);
  for (const auto& term : terms) shifted.push_back(monomial_shift(term.chi.poly, term.shift.t, term.shift.s));

  // 1_{chi = -1} = (1 - chi)/2, 1_{chi = +1} = (1 + chi)/2.
  BigInt total = 0;
  for (std::uint32_t subset = 0; subset < (1u << k); ++subset) {
    LaurentPoly2 product;
    int sign = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if ((subset >> i) & 1u) {
        product = poly_add(product, shifted[i]);
        if (!terms[i].complement) sign = -sign;
      }
    }
    if (is_trivial_on_group({product})) total += sign;
  }
  return Rational(total, BigInt(1) << k);
}

std::int64_t shift_for(int m, ShiftReading reading) {
  if (reading == ShiftReading::kLinear) return 2 * static_cast<std::int64_t>(m);
  if (m < 0 || m > 40) throw ResourceError("shift exponent out of range");
  return std::int64_t{1} << m;
}

std::optional<int> min_mixing_threshold(const Character& chi1, const Character& chi2, const Character& chi3,
                                        int m_max, ShiftReading reading) {
  if (m_max < 1) throw PreconditionError("m_max must be >= 1");
  if (is_trivial_on_group(chi1) || is_trivial_on_group(chi2) || is_trivial_on_group(chi3)) {
    throw PreconditionError("min_mixing_threshold requires nontrivial characters");
  }
  std::optional<int> m0;
  for (int m = m_max; m >= 1; --m) {
    const std::int64_t n = shift_for(m, reading);
    const Character product = chi1 * chi2.shifted(0, -n) * chi3.shifted(-n, 0);
    if (is_trivial_on_group(product)) break;
    m0 = m;
  }
  return m0;
}

}  // namespace asym
