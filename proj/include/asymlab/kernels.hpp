#pragma once

// Data-parallel inner loops. Each kernel has a serial version, kept as the
// reference the tests compare against, and an OpenMP version. Both produce
// identical integer results for any thread count: work is split into fixed
// chunks and merged by integer addition.

#include "asymlab/bitvector.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace asym::kernels {

/// Bit q of the virtual vector is bits[q - offset] (zero outside bits).
struct ShiftedBits {
  const BitVector* bits;
  std::int64_t offset;
};

/// Number of q in [lo, hi) where every operand bit is set.
std::uint64_t count_and_serial(std::span<const ShiftedBits> operands, std::int64_t lo, std::int64_t hi);
std::uint64_t count_and_parallel(std::span<const ShiftedBits> operands, std::int64_t lo, std::int64_t hi);

/// Samples handled by one RNG substream: substream i owns samples [i * 2^12, (i + 1) * 2^12).
inline constexpr std::uint64_t kSamplesPerStream = std::uint64_t{1} << 12;

/// parity(mask & row) must equal `target`. Only nonzero mask words are stored.
struct ParityMask {
  std::vector<std::pair<std::uint32_t, std::uint64_t>> words;
  bool target = false;
};

/// Row-0 layout of one Monte Carlo sample: `row_words` words drawn with next64()
/// from the sample's substream, the last one masked by `last_word_mask`.
struct RowLayout {
  std::size_t row_words = 0;
  std::uint64_t last_word_mask = ~std::uint64_t{0};
};

/// Count of samples in [0, samples) whose row satisfies every mask.
std::uint64_t mc_hits_serial(std::span<const ParityMask> masks, RowLayout layout, std::uint64_t samples,
                             std::uint64_t seed);
std::uint64_t mc_hits_parallel(std::span<const ParityMask> masks, RowLayout layout, std::uint64_t samples,
                               std::uint64_t seed);

}  // namespace asym::kernels
