// Serial vs OpenMP word kernels.

#include "asymlab/kernels.hpp"
#include "asymlab/philox.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace asym;

std::vector<BitVector> random_vectors(std::size_t count, std::size_t bits) {
  std::vector<BitVector> out;
  Philox4x32 rng(7, 0);
  for (std::size_t i = 0; i < count; ++i) {
    BitVector b(bits);
    for (auto& w : b.words()) w = rng.next64();
    b.resize(bits);
    out.push_back(std::move(b));
  }
  return out;
}

template <bool Parallel>
void BM_CountAnd(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto vecs = random_vectors(3, static_cast<std::size_t>(n));
  const std::vector<kernels::ShiftedBits> ops{{&vecs[0], 0}, {&vecs[1], 131}, {&vecs[2], 4097}};
  for (auto _ : state) {
    const auto c = Parallel ? kernels::count_and_parallel(ops, 0, n) : kernels::count_and_serial(ops, 0, n);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <bool Parallel>
void BM_McHits(benchmark::State& state) {
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  kernels::ParityMask a, b;
  a.words = {{0, 0x1ull}};
  a.target = true;
  b.words = {{0, 0x10001ull}, {2, 0x100ull}};
  b.target = true;
  const std::vector<kernels::ParityMask> masks{a, b};
  const kernels::RowLayout layout{3, ~0ull};
  for (auto _ : state) {
    const auto h = Parallel ? kernels::mc_hits_parallel(masks, layout, samples, 11)
                            : kernels::mc_hits_serial(masks, layout, samples, 11);
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}

}  // namespace

BENCHMARK(BM_CountAnd<false>)->Name("count_and/serial")->RangeMultiplier(16)->Range(1 << 16, 1 << 28);
BENCHMARK(BM_CountAnd<true>)->Name("count_and/parallel")->RangeMultiplier(16)->Range(1 << 16, 1 << 28);
BENCHMARK(BM_McHits<false>)->Name("mc_hits/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_McHits<true>)->Name("mc_hits/parallel")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);

BENCHMARK_MAIN();
