#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace asym {

/// Fixed-length packed bit vector. Bits past size() are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::size_t count() const;
  // Popcount of bits [lo, hi).
  std::size_t count_range(std::size_t lo, std::size_t hi) const;

  // The 64 bits at positions [pos, pos + 64); positions outside [0, size) read as zero.
  std::uint64_t extract64(std::int64_t pos) const;

  void append(const BitVector& other);
  void append_fill(std::size_t n, bool value);
  void resize(std::size_t n);

  BitVector& operator&=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);
  BitVector& operator^=(const BitVector& other);
  BitVector operator~() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
inline BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
inline BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

}  // namespace asym
