#include "asymlab/gf2_poly.hpp"

#include <algorithm>
#include <bit>

namespace asym {

namespace {

// Masks selecting the bit positions whose j-th index bit is clear.
constexpr std::uint64_t kLowHalf[6] = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
    0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL,
};

}  // namespace

void Gf2Poly::trim() {
  while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

Gf2Poly Gf2Poly::monomial(std::uint64_t exponent) {
  Gf2Poly p;
  p.flip(exponent);
  return p;
}

Gf2Poly Gf2Poly::from_exponents(std::span<const std::uint64_t> exponents) {
  Gf2Poly p;
  for (auto e : exponents) p.flip(e);
  return p;
}

Gf2Poly Gf2Poly::one_plus_x_pow(std::uint64_t n) {
  Gf2Poly p;
  p.words_.assign(n / 64 + 1, 0);
  // Lucas: binom(n, i) is odd iff i & ~n == 0. Walk all submasks of n.
  std::uint64_t sub = n;
  while (true) {
    p.words_[sub >> 6] |= std::uint64_t{1} << (sub & 63);
    if (sub == 0) break;
    sub = (sub - 1) & n;
  }
  p.trim();
  return p;
}

std::int64_t Gf2Poly::degree() const {
  if (words_.empty()) return -1;
  return static_cast<std::int64_t>((words_.size() - 1) * 64 + (63 - std::countl_zero(words_.back())));
}

bool Gf2Poly::coeff(std::uint64_t e) const {
  const auto wi = e >> 6;
  return wi < words_.size() && ((words_[wi] >> (e & 63)) & 1u);
}

void Gf2Poly::flip(std::uint64_t e) {
  const auto wi = e >> 6;
  if (wi >= words_.size()) words_.resize(wi + 1, 0);
  words_[wi] ^= std::uint64_t{1} << (e & 63);
  trim();
}

std::size_t Gf2Poly::term_count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::uint64_t> Gf2Poly::exponents() const {
  std::vector<std::uint64_t> out;
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    std::uint64_t w = words_[wi];
    while (w != 0) {
      out.push_back(wi * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

Gf2Poly& Gf2Poly::operator+=(const Gf2Poly& other) {
  if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
  for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] ^= other.words_[i];
  trim();
  return *this;
}

void Gf2Poly::add_shifted(const Gf2Poly& other, std::uint64_t k) {
  if (other.is_zero()) return;
  const std::size_t base = k >> 6;
  const int sh = static_cast<int>(k & 63);
  const std::size_t need = base + other.words_.size() + 1;
  if (words_.size() < need) words_.resize(need, 0);
  for (std::size_t i = 0; i < other.words_.size(); ++i) {
    words_[base + i] ^= other.words_[i] << sh;
    if (sh != 0) words_[base + i + 1] ^= other.words_[i] >> (64 - sh);
  }
  trim();
}

Gf2Poly Gf2Poly::shifted(std::uint64_t k) const {
  Gf2Poly r;
  r.add_shifted(*this, k);
  return r;
}

Gf2Poly operator*(const Gf2Poly& a, const Gf2Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const Gf2Poly& sparse = a.term_count() <= b.term_count() ? a : b;
  const Gf2Poly& dense = &sparse == &a ? b : a;
  Gf2Poly r;
  r.words_.assign(a.words_.size() + b.words_.size() + 1, 0);
  for (std::size_t wi = 0; wi < sparse.words_.size(); ++wi) {
    std::uint64_t w = sparse.words_[wi];
    while (w != 0) {
      const int bit = std::countr_zero(w);
      w &= w - 1;
      const std::size_t base = wi;
      for (std::size_t i = 0; i < dense.words_.size(); ++i) {
        r.words_[base + i] ^= dense.words_[i] << bit;
        if (bit != 0) r.words_[base + i + 1] ^= dense.words_[i] >> (64 - bit);
      }
    }
  }
  r.trim();
  return r;
}

std::uint64_t Gf2Poly::strip_x() {
  if (is_zero()) return 0;
  std::size_t wi = 0;
  while (words_[wi] == 0) ++wi;
  const std::uint64_t k = wi * 64 + static_cast<std::uint64_t>(std::countr_zero(words_[wi]));
  if (k == 0) return 0;
  Gf2Poly r;
  r.words_.assign(words_.size() - wi, 0);
  const int sh = static_cast<int>(k & 63);
  for (std::size_t i = wi; i < words_.size(); ++i) {
    r.words_[i - wi] |= sh == 0 ? words_[i] : words_[i] >> sh;
    if (sh != 0 && i > wi) r.words_[i - wi - 1] |= words_[i] << (64 - sh);
  }
  r.trim();
  *this = std::move(r);
  return k;
}

Gf2Poly Gf2Poly::compose_one_plus_x() const {
  if (is_zero()) return {};
  // p(1+x) has coefficient of x^k equal to the sum of p_i over supersets i of k
  // (Lucas). Superset sums over a power-of-two index range, word-parallel.
  std::size_t nwords = std::bit_ceil(words_.size());
  std::vector<std::uint64_t> w(nwords, 0);
  std::copy(words_.begin(), words_.end(), w.begin());
  for (auto& x : w) {
    for (int j = 0; j < 6; ++j) x ^= (x >> (1 << j)) & kLowHalf[j];
  }
  for (std::size_t stride = 1; stride < nwords; stride <<= 1) {
    for (std::size_t i = 0; i < nwords; ++i) {
      if ((i & stride) == 0) w[i] ^= w[i | stride];
    }
  }
  Gf2Poly r;
  r.words_ = std::move(w);
  r.trim();
  return r;
}

std::uint64_t Gf2Poly::strip_one_plus_x() {
  if (is_zero()) return 0;
  Gf2Poly q = compose_one_plus_x();
  const std::uint64_t k = q.strip_x();
  if (k != 0) *this = q.compose_one_plus_x();
  return k;
}

std::string Gf2Poly::to_string() const {
  if (is_zero()) return "0";
  std::string s;
  for (auto e : exponents()) {
    if (!s.empty()) s += " + ";
    if (e == 0) {
      s += "1";
    } else if (e == 1) {
      s += "x";
    } else {
      s += "x^" + std::to_string(e);
    }
  }
  return s;
}

}  // namespace asym
