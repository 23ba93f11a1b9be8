#include "asymlab/bitvector.hpp"

#include <algorithm>
#include <cassert>

namespace asym {

BitVector::BitVector(std::size_t n, bool value)
    : size_(n), words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  clear_tail();
}

void BitVector::clear_tail() {
  const std::size_t rem = size_ & 63;
  if (rem != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

std::size_t BitVector::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t BitVector::count_range(std::size_t lo, std::size_t hi) const {
  hi = std::min(hi, size_);
  if (lo >= hi) return 0;
  std::size_t c = 0;
  std::size_t pos = lo;
  while (pos < hi) {
    const std::size_t n = std::min<std::size_t>(64, hi - pos);
    std::uint64_t w = extract64(static_cast<std::int64_t>(pos));
    if (n < 64) w &= (std::uint64_t{1} << n) - 1;
    c += static_cast<std::size_t>(std::popcount(w));
    pos += n;
  }
  return c;
}

std::uint64_t BitVector::extract64(std::int64_t pos) const {
  const auto nwords = static_cast<std::int64_t>(words_.size());
  const std::int64_t wi = pos >= 0 ? pos / 64 : -((-pos + 63) / 64);
  const int sh = static_cast<int>(pos - wi * 64);
  auto word = [&](std::int64_t i) -> std::uint64_t {
    return (i >= 0 && i < nwords) ? words_[static_cast<std::size_t>(i)] : 0;
  };
  if (sh == 0) return word(wi);
  return (word(wi) >> sh) | (word(wi + 1) << (64 - sh));
}

void BitVector::resize(std::size_t n) {
  words_.resize((n + 63) / 64, 0);
  size_ = n;
  clear_tail();
}

void BitVector::append_fill(std::size_t n, bool value) {
  if (n == 0) return;
  const std::size_t old = size_;
  resize(old + n);
  if (!value) return;
  std::size_t pos = old;
  // leading partial word
  while (pos < size_ && (pos & 63) != 0) {
    set(pos);
    ++pos;
  }
  while (pos + 64 <= size_) {
    words_[pos >> 6] = ~std::uint64_t{0};
    pos += 64;
  }
  while (pos < size_) {
    set(pos);
    ++pos;
  }
}

void BitVector::append(const BitVector& other) {
  const std::size_t old = size_;
  resize(old + other.size_);
  const int sh = static_cast<int>(old & 63);
  const std::size_t base = old >> 6;
  const auto src = other.words_;
  if (sh == 0) {
    std::copy(src.begin(), src.end(), words_.begin() + static_cast<std::ptrdiff_t>(base));
  } else {
    for (std::size_t i = 0; i < src.size(); ++i) {
      words_[base + i] |= src[i] << sh;
      if (base + i + 1 < words_.size()) words_[base + i + 1] |= src[i] >> (64 - sh);
    }
  }
  clear_tail();
}

BitVector& BitVector::operator&=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitVector BitVector::operator~() const {
  BitVector r = *this;
  for (auto& w : r.words_) w = ~w;
  r.clear_tail();
  return r;
}

}  // namespace asym
