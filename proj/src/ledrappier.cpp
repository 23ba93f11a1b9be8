#include "asymlab/ledrappier.hpp"

#include "asymlab/kernels.hpp"
#include "asymlab/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace asym {

ConfigWindow::ConfigWindow(BitVector row0, std::int64_t height) {
  if (height < 0 || static_cast<std::int64_t>(row0.size()) <= height) {
    throw PreconditionError("config window needs width > height >= 0");
  }
  rows_.reserve(static_cast<std::size_t>(height) + 1);
  rows_.push_back(std::move(row0));
  for (std::int64_t s = 0; s < height; ++s) {
    const BitVector& prev = rows_.back();
    BitVector next(prev.size() - 1);
    auto out = next.words();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto pos = static_cast<std::int64_t>(i * 64);
      out[i] = prev.extract64(pos) ^ prev.extract64(pos + 1);
    }
    next.resize(prev.size() - 1);  // clears the bit shifted in past the end
    rows_.push_back(std::move(next));
  }
}

bool ConfigWindow::satisfies_local_rule() const {
  for (std::size_t s = 0; s + 1 < rows_.size(); ++s) {
    const BitVector& lo = rows_[s];
    const BitVector& hi = rows_[s + 1];
    for (std::size_t z = 0; z < hi.size(); ++z) {
      if (hi.test(z) != (lo.test(z) ^ lo.test(z + 1))) return false;
    }
  }
  return true;
}

namespace {

BitVector random_row(std::int64_t width, Philox4x32& rng) {
  BitVector row(static_cast<std::size_t>(width));
  for (auto& w : row.words()) w = rng.next64();
  row.resize(static_cast<std::size_t>(width));
  return row;
}

}  // namespace

ConfigWindow sample_config(std::int64_t width, std::int64_t height, std::uint64_t seed) {
  if (height < 0 || width <= height) throw PreconditionError("sample_config needs width > height >= 0");
  Philox4x32 rng(seed, 0);
  ConfigWindow window(random_row(width, rng), height);
#ifndef NDEBUG
  if (!window.satisfies_local_rule()) throw std::logic_error("sampled window violates the local rule");
#endif
  return window;
}

std::vector<std::int64_t> cell_functional(std::int64_t z1, std::int64_t z2) {
  if (z2 < 0) throw PreconditionError("cell_functional needs z2 >= 0");
  std::vector<std::int64_t> out;
  const auto n = static_cast<std::uint64_t>(z2);
  // binom(n, i) odd iff i is a submask of n (Lucas); enumerate ascending.
  std::uint64_t sub = 0;
  while (true) {
    out.push_back(z1 + static_cast<std::int64_t>(sub));
    if (sub == n) break;
    sub = ((sub | ~n) + 1) & n;
  }
  return out;
}

namespace {

// One linear condition on the configuration: parity of the listed cells.
struct CellParity {
  std::vector<Cell> cells;
  bool target = false;
};

std::vector<CellParity> to_conditions(std::span<const ShiftedSet> sets) {
  std::vector<CellParity> out;
  for (const auto& item : sets) {
    const Exponent v = item.shift;
    if (const auto* cs = std::get_if<CharacterSet>(&item.set)) {
      CellParity c;
      c.target = true;
      for (const auto& e : cs->chi.poly.support()) c.cells.push_back({e.t + v.t, e.s + v.s});
      out.push_back(std::move(c));
    } else {
      const auto& cyl = std::get<Cylinder>(item.set);
      for (const auto& con : cyl.constraints) {
        if (con.cell.z2 < 0) throw PreconditionError("cylinder constraint below the half-plane");
        out.push_back({{Cell{con.cell.z1 + v.t, con.cell.z2 + v.s}}, con.value});
      }
    }
  }
  return out;
}

struct RowSystem {
  std::int64_t width = 0;
  std::vector<BitVector> functionals;
  std::vector<bool> targets;
};

// Translate into the window z1, z2 >= 0 and express every condition on row 0.
RowSystem to_row_system(std::span<const ShiftedSet> sets, std::int64_t window_cap) {
  const auto conditions = to_conditions(sets);
  std::int64_t min_z1 = std::numeric_limits<std::int64_t>::max(), min_z2 = min_z1;
  std::int64_t max_z1 = std::numeric_limits<std::int64_t>::min(), max_z2 = max_z1;
  for (const auto& c : conditions) {
    for (const auto& cell : c.cells) {
      min_z1 = std::min(min_z1, cell.z1);
      max_z1 = std::max(max_z1, cell.z1);
      min_z2 = std::min(min_z2, cell.z2);
      max_z2 = std::max(max_z2, cell.z2);
    }
  }
  RowSystem sys;
  if (min_z1 > max_z1) {
    sys.width = 1;
  } else {
    sys.width = (max_z1 - min_z1) + (max_z2 - min_z2) + 1;
  }
  if (sys.width > window_cap) throw ResourceError("query needs a row-0 window wider than the cap");
  for (const auto& c : conditions) {
    BitVector f(static_cast<std::size_t>(sys.width));
    for (const auto& cell : c.cells) {
      for (auto col : cell_functional(cell.z1 - min_z1, cell.z2 - min_z2)) f.flip(static_cast<std::size_t>(col));
    }
    sys.functionals.push_back(std::move(f));
    sys.targets.push_back(c.target);
  }
  return sys;
}

}  // namespace

Rational exact_correlation(std::span<const ShiftedSet> sets, std::int64_t window_cap) {
  RowSystem sys = to_row_system(sets, window_cap);
  // Gaussian elimination on [functional | target].
  auto& rows = sys.functionals;
  std::vector<bool> rhs = sys.targets;
  std::size_t rank = 0;
  const auto width = static_cast<std::size_t>(sys.width);
  for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot].test(col)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    std::swap(rhs[rank], rhs[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r].test(col)) {
        rows[r] ^= rows[rank];
        rhs[r] = rhs[r] != rhs[rank];
      }
    }
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r) {
    if (rhs[r]) return Rational(0);
  }
  return Rational(BigInt(1), BigInt(1) << rank);
}

Rational exact_cylinder_correlation(std::span<const ShiftedSet> sets, std::int64_t window_cap) {
  for (const auto& s : sets) {
    if (!std::holds_alternative<Cylinder>(s.set)) throw PreconditionError("expected cylinder sets only");
  }
  return exact_correlation(sets, window_cap);
}

McEstimate mc_correlation(std::span<const ShiftedSet> sets, std::uint64_t samples, std::uint64_t seed,
                          const McOptions& options) {
  if (samples == 0) throw PreconditionError("mc_correlation needs samples >= 1");
  const RowSystem sys = to_row_system(sets, options.window_cap);
  std::vector<kernels::ParityMask> masks;
  for (std::size_t i = 0; i < sys.functionals.size(); ++i) {
    kernels::ParityMask m;
    m.target = sys.targets[i];
    const auto words = sys.functionals[i].words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (words[w] != 0) m.words.emplace_back(static_cast<std::uint32_t>(w), words[w]);
    }
    masks.push_back(std::move(m));
  }
  kernels::RowLayout layout;
  layout.row_words = static_cast<std::size_t>((sys.width + 63) / 64);
  const auto rem = static_cast<int>(sys.width % 64);
  layout.last_word_mask = rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;

  McEstimate out;
  out.samples = samples;
  out.hits = options.parallel ? kernels::mc_hits_parallel(masks, layout, samples, seed)
                              : kernels::mc_hits_serial(masks, layout, samples, seed);
  out.estimate = Rational(BigInt(out.hits), BigInt(samples));
  const double p = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

Theorem1Report theorem1_certificate(const Character& chi, int m_max) {
  if (m_max < 1) throw PreconditionError("m_max must be >= 1");
  if (is_trivial_on_group(chi)) throw PreconditionError("theorem1_certificate needs a nontrivial character");
  Theorem1Report report;
  report.chi = chi;
  const CharacterSetTerm single[] = {{chi, {0, 0}}};
  report.measure = character_set_correlation(single);

  bool forward_ok = true;
  for (int m = 1; m <= m_max; ++m) {
    const std::int64_t n = shift_for(m, ShiftReading::kPowerOfTwo);
    Theorem1Row row;
    row.m = m;
    const CharacterSetTerm fwd[] = {{chi, {0, 0}}, {chi, {0, n}}, {chi, {n, 0}}};
    const CharacterSetTerm bwd[] = {{chi, {0, 0}}, {chi, {0, -n}}, {chi, {-n, 0}}};
    row.forward = character_set_correlation(fwd);
    row.backward = character_set_correlation(bwd);
    row.pair1_nontrivial = !is_trivial_on_group(chi * chi.shifted(0, n));
    row.pair2_nontrivial = !is_trivial_on_group(chi.shifted(0, n) * chi.shifted(n, 0));
    forward_ok = forward_ok && row.forward == 0;
    report.rows.push_back(std::move(row));
  }
  const Rational eighth(1, 8);
  for (int i = static_cast<int>(report.rows.size()) - 1; i >= 0; --i) {
    if (report.rows[static_cast<std::size_t>(i)].backward != eighth) break;
    report.backward_threshold = report.rows[static_cast<std::size_t>(i)].m;
  }
  report.pass = forward_ok && report.measure == Rational(1, 2) && report.backward_threshold.has_value();
  return report;
}

}  // namespace asym
