#include "asymlab/correlation_engine.hpp"

#include "asymlab/kernels.hpp"

#include <boost/container_hash/hash.hpp>

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace asym {

namespace {

// Level q of the current stage must satisfy: level q - offset is in set.
struct Probe {
  std::int64_t offset = 0;
  std::uint32_t set = 0;
  friend auto operator<=>(const Probe&, const Probe&) = default;
};

struct Key {
  int stage = 0;
  std::int64_t lo = 0;  // -1, -1 for the full valid window
  std::int64_t hi = 0;
  std::vector<Probe> probes;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 0;
    boost::hash_combine(h, k.stage);
    boost::hash_combine(h, k.lo);
    boost::hash_combine(h, k.hi);
    for (const auto& p : k.probes) {
      boost::hash_combine(h, p.offset);
      boost::hash_combine(h, p.set);
    }
    return h;
  }
};

// Windows this short are counted level by level.
constexpr std::int64_t kBruteWindow = 16;

class Engine {
 public:
  Engine(const Tower& tower, const std::vector<const LevelSet*>& sets, int J, const EngineOptions& options)
      : tower_(tower), options_(options) {
    if (J > tower.top_stage()) throw PreconditionError("evaluation stage is not built");
    int b = 0;
    for (const auto* s : sets) b = std::max(b, s->stage);
    if (J < b) throw PreconditionError("evaluation stage below an input set's stage");
    switch (options.mode) {
      case EngineMode::kFlat:
        flat_stage_ = J;
        break;
      case EngineMode::kHierarchical:
        flat_stage_ = b;
        break;
      case EngineMode::kAuto:
        flat_stage_ = b;
        while (flat_stage_ < J && tower.height(flat_stage_ + 1) <= options.flat_cap) ++flat_stage_;
        break;
    }
    for (const auto* s : sets) {
      flat_.push_back(refine(tower, *s, flat_stage_, options.level_cap).levels);
      exterior_.push_back(s->exterior);
    }
  }

  std::int64_t count(int t, std::vector<Probe> probes, std::int64_t lo, std::int64_t hi) {
    if (probes.empty()) return std::max<std::int64_t>(0, std::min(hi, tower_.height(t)) - std::max<std::int64_t>(lo, 0));
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    const std::int64_t m = probes.front().offset;
    for (auto& p : probes) p.offset -= m;
    lo -= m;
    hi -= m;
    const std::int64_t spread = probes.back().offset;
    const std::int64_t height = tower_.height(t);
    lo = std::max(lo, spread);
    hi = std::min(hi, height);
    if (lo >= hi) return 0;
    if (t == flat_stage_) return kernel(probes, lo, hi);
    if (hi - lo <= kBruteWindow) return brute(t, probes, lo, hi);

    const bool full = lo == spread && hi == height;
    Key key{t, full ? -1 : lo, full ? -1 : hi, probes};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::int64_t result = split(t, probes, lo, hi);
    memo_.emplace(std::move(key), result);
    if (options_.stats) options_.stats->memo_entries = memo_.size();
    return result;
  }

 private:
  std::int64_t kernel(const std::vector<Probe>& probes, std::int64_t lo, std::int64_t hi) {
    std::vector<kernels::ShiftedBits> ops;
    ops.reserve(probes.size());
    for (const auto& p : probes) ops.push_back({&flat_[p.set], p.offset});
    if (options_.stats) ++options_.stats->kernel_calls;
    const auto n = options_.parallel ? kernels::count_and_parallel(ops, lo, hi) : kernels::count_and_serial(ops, lo, hi);
    return static_cast<std::int64_t>(n);
  }

  bool member(int t, std::int64_t pos, std::uint32_t set) const {
    while (t > flat_stage_) {
      const auto loc = tower_.locate(t, pos);
      if (loc.spacer) return exterior_[set];
      pos = loc.inner;
      --t;
    }
    return flat_[set].test(static_cast<std::size_t>(pos));
  }

  std::int64_t brute(int t, const std::vector<Probe>& probes, std::int64_t lo, std::int64_t hi) const {
    std::int64_t n = 0;
    for (auto q = lo; q < hi; ++q) {
      bool all = true;
      for (const auto& p : probes) {
        if (!member(t, q - p.offset, p.set)) {
          all = false;
          break;
        }
      }
      n += all ? 1 : 0;
    }
    return n;
  }

  // Cut [lo, hi) where any probe crosses a column or spacer-run boundary; inside
  // each piece every probe stays in one block, so the piece is either decided by
  // the spacer flags or is a count over a window of stage t - 1.
  std::int64_t split(int t, const std::vector<Probe>& probes, std::int64_t lo, std::int64_t hi) {
    const TowerStage& below = tower_.stage(t - 1);
    const auto& base = below.base_offsets;
    const std::int64_t hc = below.height;

    std::vector<std::int64_t> cuts{lo, hi};
    for (const auto& p : probes) {
      const std::int64_t x_lo = lo - p.offset, x_hi = hi - p.offset;
      auto c = static_cast<std::size_t>(std::upper_bound(base.begin(), base.end(), x_lo) - base.begin()) - 1;
      for (; c < base.size() && base[c] < x_hi; ++c) {
        for (const std::int64_t x : {base[c], base[c] + hc}) {
          if (x > x_lo && x < x_hi) cuts.push_back(x + p.offset);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::int64_t total = 0;
    std::vector<Probe> child;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const std::int64_t a = cuts[i], b = cuts[i + 1];
      child.clear();
      bool empty = false;
      for (const auto& p : probes) {
        const auto loc = tower_.locate(t, a - p.offset);
        if (loc.spacer) {
          if (!exterior_[p.set]) {
            empty = true;
            break;
          }
          continue;
        }
        // Child window starts at a: level q - offset is child level (q - a) - new offset.
        child.push_back({p.offset + base[static_cast<std::size_t>(loc.column)] - a, p.set});
      }
      if (empty) continue;
      total += child.empty() ? b - a : count(t - 1, child, 0, b - a);
    }
    return total;
  }

  const Tower& tower_;
  EngineOptions options_;
  int flat_stage_ = 0;
  std::vector<BitVector> flat_;
  std::vector<bool> exterior_;
  std::unordered_map<Key, std::int64_t, KeyHash> memo_;
};

struct Prepared {
  std::vector<const LevelSet*> sets;
  std::vector<Probe> probes;  // offsets are the raw shifts
};

Prepared prepare(std::span<const CorrelationItem> items) {
  if (items.empty()) throw PreconditionError("correlation needs at least one set");
  Prepared out;
  for (const auto& item : items) {
    const LevelSet* s = &item.set.get();
    auto it = std::find(out.sets.begin(), out.sets.end(), s);
    if (it == out.sets.end()) it = out.sets.insert(out.sets.end(), s);
    out.probes.push_back({item.shift, static_cast<std::uint32_t>(it - out.sets.begin())});
  }
  return out;
}

}  // namespace

std::int64_t count_shifted_levels(const Tower& tower, std::span<const CorrelationItem> items, int J, std::int64_t lo,
                                  std::int64_t hi, const EngineOptions& options) {
  const Prepared prep = prepare(items);
  Engine engine(tower, prep.sets, J, options);
  return engine.count(J, prep.probes, lo, hi);
}

CertifiedMeasure certified_correlation(const Tower& tower, std::span<const CorrelationItem> items, int J,
                                       const EngineOptions& options) {
  Prepared prep = prepare(items);
  std::int64_t kmin = std::numeric_limits<std::int64_t>::max(), kmax = std::numeric_limits<std::int64_t>::min();
  for (const auto& p : prep.probes) {
    kmin = std::min(kmin, p.offset);
    kmax = std::max(kmax, p.offset);
  }
  if (J < 0 || J > tower.top_stage()) throw PreconditionError("evaluation stage is not built");
  const std::int64_t spread = kmax - kmin;
  if (spread >= tower.height(J)) throw PreconditionError("shift spread must be below h_J");
  for (auto& p : prep.probes) p.offset -= kmin;

  // Levels below spread only need the unshifted factor; prefer one without exterior mass.
  const Probe* anchor = nullptr;
  for (const auto& p : prep.probes) {
    if (p.offset == 0 && (anchor == nullptr || !prep.sets[p.set]->exterior)) anchor = &p;
  }

  Engine engine(tower, prep.sets, J, options);
  const Rational& w = tower.width(J);
  CertifiedMeasure out;
  out.value = Rational(engine.count(J, prep.probes, spread, tower.height(J))) * w;
  out.bound = spread > 0 ? Rational(engine.count(J, {*anchor}, 0, spread)) * w : Rational(0);
  if (prep.sets[anchor->set]->exterior) {
    if (!tower.finite()) throw PreconditionError("correlation bound is infinite for exterior sets of an infinite plan");
    out.bound += *tower.total_measure() - tower.stage(J).measure;
  }
  return out;
}

}  // namespace asym
