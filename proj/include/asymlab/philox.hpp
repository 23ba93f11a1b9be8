#pragma once

#include <array>
#include <cstdint>

namespace asym {

/// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
///   multipliers 0xD2511F53, 0xCD9E8D57; Weyl key increments 0x9E3779B9, 0xBB67AE85;
///   10 rounds; the key is bumped between rounds.
/// A stream is identified by (seed, stream index): key = seed, counter words 2..3 =
/// stream index, counter words 0..1 = block number within the stream.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block bijection(Block counter, Key key);

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next32();
  std::uint64_t next64();

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace asym
