#include "asymlab/kernels.hpp"

#include "asymlab/philox.hpp"

#include <algorithm>
#include <bit>

namespace asym::kernels {

namespace {

inline std::uint64_t and_word(std::span<const ShiftedBits> operands, std::int64_t q0) {
  std::uint64_t acc = ~std::uint64_t{0};
  for (const auto& op : operands) {
    acc &= op.bits->extract64(q0 - op.offset);
    if (acc == 0) break;
  }
  return acc;
}

inline std::uint64_t tail_mask(std::int64_t remaining) {
  return remaining >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << remaining) - 1;
}

inline bool sample_hits(std::span<const ParityMask> masks, const std::vector<std::uint64_t>& row) {
  for (const auto& m : masks) {
    std::uint64_t acc = 0;
    for (const auto& [wi, w] : m.words) acc ^= row[wi] & w;
    if ((std::popcount(acc) & 1) != static_cast<int>(m.target)) return false;
  }
  return true;
}

std::uint64_t stream_hits(std::span<const ParityMask> masks, RowLayout layout, std::uint64_t stream,
                          std::uint64_t count, std::uint64_t seed, std::vector<std::uint64_t>& row) {
  Philox4x32 rng(seed, stream);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < layout.row_words; ++i) row[i] = rng.next64();
    row[layout.row_words - 1] &= layout.last_word_mask;
    if (sample_hits(masks, row)) ++hits;
  }
  return hits;
}

}  // namespace

std::uint64_t count_and_serial(std::span<const ShiftedBits> operands, std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return 0;
  std::uint64_t total = 0;
  for (std::int64_t q0 = lo; q0 < hi; q0 += 64) {
    total += static_cast<std::uint64_t>(std::popcount(and_word(operands, q0) & tail_mask(hi - q0)));
  }
  return total;
}

std::uint64_t count_and_parallel(std::span<const ShiftedBits> operands, std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return 0;
  const std::int64_t nwords = (hi - lo + 63) / 64;
  std::uint64_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static) if (nwords > 4096)
  for (std::int64_t w = 0; w < nwords; ++w) {
    const std::int64_t q0 = lo + 64 * w;
    total += static_cast<std::uint64_t>(std::popcount(and_word(operands, q0) & tail_mask(hi - q0)));
  }
  return total;
}

std::uint64_t mc_hits_serial(std::span<const ParityMask> masks, RowLayout layout, std::uint64_t samples,
                             std::uint64_t seed) {
  if (samples == 0 || layout.row_words == 0) return 0;
  std::vector<std::uint64_t> row(layout.row_words);
  std::uint64_t hits = 0;
  const std::uint64_t streams = (samples + kSamplesPerStream - 1) / kSamplesPerStream;
  for (std::uint64_t i = 0; i < streams; ++i) {
    const std::uint64_t count = std::min(kSamplesPerStream, samples - i * kSamplesPerStream);
    hits += stream_hits(masks, layout, i, count, seed, row);
  }
  return hits;
}

std::uint64_t mc_hits_parallel(std::span<const ParityMask> masks, RowLayout layout, std::uint64_t samples,
                               std::uint64_t seed) {
  if (samples == 0 || layout.row_words == 0) return 0;
  const auto streams = static_cast<std::int64_t>((samples + kSamplesPerStream - 1) / kSamplesPerStream);
  std::uint64_t hits = 0;
#pragma omp parallel reduction(+ : hits)
  {
    std::vector<std::uint64_t> row(layout.row_words);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < streams; ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      const std::uint64_t count = std::min(kSamplesPerStream, samples - ui * kSamplesPerStream);
      hits += stream_hits(masks, layout, ui, count, seed, row);
    }
  }
  return hits;
}

}  // namespace asym::kernels
