#include "asymlab/rank_one.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace asym {

namespace {

std::int64_t json_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ParseError(std::string("plan: \"") + key + "\" must be an integer");
  }
  return j.at(key).get<std::int64_t>();
}

}  // namespace

SpacerPlan SpacerPlan::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("plan: expected a JSON object");
  SpacerPlan plan;
  plan.h0 = j.contains("h0") ? json_int(j, "h0") : 1;
  if (plan.h0 < 1) throw ParseError("plan: h0 must be positive");
  if (!j.contains("stages") || !j.at("stages").is_array()) throw ParseError("plan: \"stages\" must be an array");
  for (const auto& st : j.at("stages")) {
    if (!st.is_object()) throw ParseError("plan: each stage must be an object");
    StageSpec spec;
    spec.N = json_int(st, "N");
    spec.L = json_int(st, "L");
    if (!st.contains("H")) throw ParseError("plan: stage needs \"H\"");
    const auto& h = st.at("H");
    if (h.is_string() && h.get<std::string>() == "auto-height") {
      spec.H.reset();
    } else if (h.is_number_integer()) {
      spec.H = h.get<std::int64_t>();
    } else {
      throw ParseError("plan: \"H\" must be an integer or \"auto-height\"");
    }
    if (spec.N < 1 || spec.L < 1 || (spec.H && *spec.H < 0)) {
      throw ParseError("plan: need N >= 1, L >= 1, H >= 0");
    }
    plan.stages.push_back(spec);
  }
  if (plan.stages.empty()) throw ParseError("plan: empty stage list");
  return plan;
}

SpacerPlan SpacerPlan::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("plan file " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json SpacerPlan::to_json() const {
  nlohmann::json stages_json = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json st{{"N", s.N}, {"L", s.L}};
    if (s.H) {
      st["H"] = *s.H;
    } else {
      st["H"] = "auto-height";
    }
    stages_json.push_back(std::move(st));
  }
  return {{"h0", h0}, {"stages", std::move(stages_json)}};
}

SpacerPlan SpacerPlan::blocks(std::span<const std::int64_t> n_per_stage, std::optional<std::int64_t> fixed_l,
                              std::optional<std::int64_t> h, std::int64_t h0) {
  SpacerPlan plan;
  plan.h0 = h0;
  for (std::size_t j = 0; j < n_per_stage.size(); ++j) {
    plan.stages.push_back({n_per_stage[j], fixed_l.value_or(static_cast<std::int64_t>(j) + 2), h});
  }
  return plan;
}

SpacerPlan SpacerPlan::cycling(std::int64_t n_max, int stage_count) {
  std::vector<std::int64_t> ns;
  for (int j = 0; j < stage_count; ++j) ns.push_back(1 + j % n_max);
  return blocks(ns);
}

std::vector<std::int64_t> spacer_array(const StageSpec& spec, std::int64_t height) {
  const std::int64_t H = spec.height_param(height);
  std::vector<std::int64_t> s;
  s.reserve(static_cast<std::size_t>(spec.cuts()));
  for (std::int64_t t = 0; t < spec.L; ++t) {
    s.push_back(H);
    s.push_back(H + 2 * spec.N);
    s.push_back(H + spec.N);
  }
  return s;
}

const StageSpec& Tower::spec(int j) const {
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(j), plan_.stages.size() - 1);
  return plan_.stages[k];
}

namespace {

// h * r + L * (3H + 3N) in 128 bits.
__int128 next_height(const StageSpec& spec, std::int64_t h) {
  const __int128 H = spec.height_param(h);
  return static_cast<__int128>(h) * spec.cuts() + static_cast<__int128>(spec.L) * (3 * H + 3 * spec.N);
}

void finish_classification(const SpacerPlan& plan, MeasureClass& cls, std::optional<Rational>& total) {
  const StageSpec& last = plan.stages.back();
  if (last.auto_height()) {
    cls = MeasureClass::kInfinite;
    total.reset();
    return;
  }
  // Listed stages exactly, then the geometric tail of the repeating last spec.
  BigInt h = plan.h0;
  Rational w = 1;
  for (const auto& spec : plan.stages) {
    const BigInt H = spec.H ? BigInt(*spec.H) : h;
    h = h * spec.cuts() + BigInt(spec.L) * (3 * H + 3 * spec.N);
    w /= spec.cuts();
  }
  const Rational mu_k = Rational(h) * w;
  const BigInt spacers = BigInt(last.L) * (3 * *last.H + 3 * last.N);
  cls = MeasureClass::kFinite;
  total = mu_k + Rational(spacers) * w / (last.cuts() - 1);
}

}  // namespace

Tower Tower::build_impl(const SpacerPlan& plan, int J, const TowerLimits& limits, bool stop_quietly) {
  if (plan.stages.empty()) throw PreconditionError("plan has no stages");
  if (J < 0) throw PreconditionError("stage index must be nonnegative");
  std::vector<TowerStage> stages;
  TowerStage s0;
  s0.index = 0;
  s0.height = plan.h0;
  s0.width = 1;
  s0.measure = plan.h0;
  stages.push_back(std::move(s0));
  for (int j = 0; j < J; ++j) {
    const StageSpec& spec = plan.stages[std::min<std::size_t>(static_cast<std::size_t>(j), plan.stages.size() - 1)];
    TowerStage& cur = stages.back();
    const __int128 next = next_height(spec, cur.height);
    if (j + 1 > limits.max_stage || next > limits.max_height) {
      if (stop_quietly) break;
      throw ResourceError("stage " + std::to_string(j + 1) + " exceeds the tower limits");
    }
    cur.spec = spec;
    cur.spacers = spacer_array(spec, cur.height);
    cur.base_offsets.resize(cur.spacers.size());
    std::int64_t base = 0;
    for (std::size_t c = 0; c < cur.spacers.size(); ++c) {
      cur.base_offsets[c] = base;
      base += cur.height + cur.spacers[c];
    }
    TowerStage nxt;
    nxt.index = j + 1;
    nxt.height = static_cast<std::int64_t>(next);
    nxt.width = cur.width / spec.cuts();
    nxt.measure = nxt.width * nxt.height;
    stages.push_back(std::move(nxt));
  }
  Tower t;
  t.plan_ = plan;
  t.stages_ = std::move(stages);
  finish_classification(t.plan_, t.class_, t.total_);
  return t;
}

Tower Tower::build(const SpacerPlan& plan, int J, const TowerLimits& limits) {
  return build_impl(plan, J, limits, false);
}

Tower Tower::build_max(const SpacerPlan& plan, const TowerLimits& limits) {
  return build_impl(plan, limits.max_stage, limits, true);
}

Tower::Locus Tower::locate(int t, std::int64_t pos) const {
  const TowerStage& below = stage(t - 1);
  const auto& base = below.base_offsets;
  // Last column whose bottom is <= pos.
  const auto it = std::upper_bound(base.begin(), base.end(), pos);
  const auto c = static_cast<std::int64_t>(it - base.begin()) - 1;
  const std::int64_t inner = pos - base[static_cast<std::size_t>(c)];
  if (inner < below.height) return {false, c, inner};
  return {true, c, inner - below.height};
}

// ---------------------------------------------------------------------------
// Level sets

LevelSet LevelSet::none(const Tower& tower, int stage) {
  return {stage, BitVector(static_cast<std::size_t>(tower.height(stage))), false};
}

LevelSet LevelSet::whole(const Tower& tower, int stage) {
  return {stage, BitVector(static_cast<std::size_t>(tower.height(stage)), true), true};
}

LevelSet LevelSet::of_levels(const Tower& tower, int stage, std::span<const std::int64_t> levels) {
  LevelSet a = none(tower, stage);
  for (auto l : levels) {
    if (l < 0 || l >= tower.height(stage)) throw PreconditionError("level out of range");
    a.levels.set(static_cast<std::size_t>(l));
  }
  return a;
}

LevelSet LevelSet::from_json(const Tower& tower, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("stage") || !j.at("stage").is_number_integer()) {
    throw ParseError("level set: expected {\"stage\": j, \"levels\": [...]}");
  }
  const auto stage = j.at("stage").get<int>();
  if (stage < 0 || stage > tower.top_stage()) throw ParseError("level set: stage out of range");
  LevelSet a = none(tower, stage);
  const std::int64_t h = tower.height(stage);
  if (j.contains("levels")) {
    if (!j.at("levels").is_array()) throw ParseError("level set: \"levels\" must be an array");
    for (const auto& item : j.at("levels")) {
      std::int64_t lo = 0, hi = 0;
      if (item.is_number_integer()) {
        lo = item.get<std::int64_t>();
        hi = lo + 1;
      } else if (item.is_array() && item.size() == 2 && item[0].is_number_integer() && item[1].is_number_integer()) {
        lo = item[0].get<std::int64_t>();
        hi = item[1].get<std::int64_t>();
      } else {
        throw ParseError("level set: each entry is a level or a [lo, hi) pair");
      }
      if (lo < 0 || hi > h || lo > hi) throw ParseError("level set: range outside [0, h)");
      for (auto l = lo; l < hi; ++l) a.levels.set(static_cast<std::size_t>(l));
    }
  }
  if (j.contains("exterior")) {
    if (!j.at("exterior").is_boolean()) throw ParseError("level set: \"exterior\" must be boolean");
    a.exterior = j.at("exterior").get<bool>();
  }
  return a;
}

nlohmann::json LevelSet::to_json() const {
  nlohmann::json ranges = nlohmann::json::array();
  std::size_t i = 0;
  while (i < levels.size()) {
    if (!levels.test(i)) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k < levels.size() && levels.test(k)) ++k;
    if (k == i + 1) {
      ranges.push_back(i);
    } else {
      ranges.push_back({i, k});
    }
    i = k;
  }
  nlohmann::json out{{"stage", stage}, {"levels", std::move(ranges)}};
  if (exterior) out["exterior"] = true;
  return out;
}

namespace {

void require_same_stage(const LevelSet& a, const LevelSet& b) {
  if (a.stage != b.stage) throw PreconditionError("level sets must share a stage; refine first");
}

}  // namespace

LevelSet set_union(const LevelSet& a, const LevelSet& b) {
  require_same_stage(a, b);
  return {a.stage, a.levels | b.levels, a.exterior || b.exterior};
}

LevelSet set_intersection(const LevelSet& a, const LevelSet& b) {
  require_same_stage(a, b);
  return {a.stage, a.levels & b.levels, a.exterior && b.exterior};
}

LevelSet set_complement(const LevelSet& a) { return {a.stage, ~a.levels, !a.exterior}; }

Rational measure(const Tower& tower, const LevelSet& a) {
  Rational m = Rational(BigInt(a.count())) * tower.width(a.stage);
  if (a.exterior) {
    if (!tower.finite()) throw PreconditionError("exterior set has infinite measure");
    m += *tower.total_measure() - tower.stage(a.stage).measure;
  }
  return m;
}

LevelSet refine(const Tower& tower, const LevelSet& a, int J, std::int64_t level_cap) {
  if (J < a.stage) throw PreconditionError("refine needs J >= the set's stage");
  if (J > tower.top_stage()) throw PreconditionError("refine past the built tower");
  if (tower.height(J) > level_cap) throw ResourceError("refined level set exceeds the level cap");
  LevelSet cur = a;
  for (int j = a.stage; j < J; ++j) {
    const TowerStage& st = tower.stage(j);
    BitVector next;
    for (auto s : st.spacers) {
      next.append(cur.levels);
      next.append_fill(static_cast<std::size_t>(s), cur.exterior);
    }
    cur.levels = std::move(next);
    cur.stage = j + 1;
  }
  return cur;
}

std::int64_t mixing_sequence_n(const Tower& tower, int j) {
  const StageSpec& spec = tower.spec(j);
  const std::int64_t h = tower.height(j);
  return h + spec.height_param(h) + spec.N;
}

ColumnBases column_bases(const Tower& tower, int j, std::int64_t triple) {
  if (j + 1 > tower.top_stage()) throw PreconditionError("column_bases needs stage j + 1 built");
  const TowerStage& st = tower.stage(j);
  if (triple < 0 || triple >= st.spec.L) throw PreconditionError("triple index out of range");
  auto single = [&](std::int64_t c) {
    const std::int64_t level = st.base_offsets[static_cast<std::size_t>(c)];
    return LevelSet::of_levels(tower, j + 1, std::span(&level, 1));
  };
  return {single(3 * triple), single(3 * triple + 1), single(3 * triple + 2)};
}

// ---------------------------------------------------------------------------
// Points

namespace {

BigInt floor_rational(const Rational& q) {
  BigInt n = boost::multiprecision::numerator(q);
  const BigInt d = boost::multiprecision::denominator(q);
  BigInt f = n / d;
  if (n < 0 && f * d != n) --f;
  return f;
}

// Stage where p first belongs to the tower, with its level and offset there.
struct Entry {
  int stage = 0;
  PointLocus where;
};

std::optional<Entry> entry_of(const Tower& tower, const Rational& p, int max_stage) {
  if (p < 0) return std::nullopt;
  if (p < tower.stage(0).measure) {
    const BigInt l = floor_rational(p);
    return Entry{0, {static_cast<std::int64_t>(l), p - Rational(l)}};
  }
  const int top = std::min(max_stage, tower.top_stage());
  for (int u = 1; u <= top; ++u) {
    const TowerStage& below = tower.stage(u - 1);
    const TowerStage& here = tower.stage(u);
    if (p >= here.measure) continue;
    const Rational rel = (p - below.measure) / here.width;
    const BigInt k_big = floor_rational(rel);
    auto k = static_cast<std::int64_t>(k_big);
    const Rational offset = p - below.measure - Rational(k_big) * here.width;
    for (std::size_t c = 0; c < below.spacers.size(); ++c) {
      if (k < below.spacers[c]) {
        return Entry{u, {below.base_offsets[c] + below.height + k, offset}};
      }
      k -= below.spacers[c];
    }
    return std::nullopt;  // unreachable for a consistent tower
  }
  return std::nullopt;
}

// One stage deeper: the column is the c-th subinterval of the level.
PointLocus descend(const Tower& tower, int t, const PointLocus& at) {
  const TowerStage& st = tower.stage(t);
  const Rational& w_next = tower.width(t + 1);
  const BigInt c_big = floor_rational(at.offset / w_next);
  const auto c = static_cast<std::size_t>(c_big);
  return {st.base_offsets[c] + at.level, at.offset - Rational(c_big) * w_next};
}

}  // namespace

std::optional<PointLocus> locate_point(const Tower& tower, const Rational& p, int t) {
  const auto e = entry_of(tower, p, t);
  if (!e) return std::nullopt;
  PointLocus at = e->where;
  for (int u = e->stage; u < t; ++u) at = descend(tower, u, at);
  return at;
}

Rational level_left(const Tower& tower, int t, std::int64_t pos) {
  if (t == 0) return Rational(pos);
  const auto loc = tower.locate(t, pos);
  if (!loc.spacer) return level_left(tower, t - 1, loc.inner) + Rational(loc.column) * tower.width(t);
  const TowerStage& below = tower.stage(t - 1);
  std::int64_t index = loc.inner;
  for (std::int64_t c = 0; c < loc.column; ++c) index += below.spacers[static_cast<std::size_t>(c)];
  return below.measure + Rational(index) * tower.width(t);
}

std::optional<Rational> orbit_point(const Tower& tower, const Rational& p, std::int64_t steps, int max_stage) {
  const int top = std::min(max_stage, tower.top_stage());
  Rational cur = p;
  const bool forward = steps > 0;
  for (std::int64_t i = 0; i < (forward ? steps : -steps); ++i) {
    const auto e = entry_of(tower, cur, top);
    if (!e) return std::nullopt;
    int t = e->stage;
    PointLocus at = e->where;
    auto blocked = [&] { return forward ? at.level == tower.height(t) - 1 : at.level == 0; };
    while (blocked()) {
      if (t >= top) return std::nullopt;
      at = descend(tower, t, at);
      ++t;
    }
    cur = level_left(tower, t, at.level + (forward ? 1 : -1)) + at.offset;
  }
  return cur;
}

}  // namespace asym
