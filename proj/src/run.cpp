#include "asymlab/run.hpp"

#include "asymlab/asymptotics.hpp"
#include "asymlab/ledrappier.hpp"
#include "asymlab/literals.hpp"
#include "asymlab/rank_one.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace asym {

namespace {

const std::map<std::string, Experiment>& experiment_table() {
  static const std::map<std::string, Experiment> table{
      {"theorem1", Experiment::kTheorem1},    {"theorem2", Experiment::kTheorem2},
      {"theorem3", Experiment::kTheorem3},    {"theorem4", Experiment::kTheorem4},
      {"weak-limit", Experiment::kWeakLimit}, {"backward", Experiment::kBackward},
  };
  return table;
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  const auto it = experiment_table().find(name);
  if (it == experiment_table().end()) throw ParseError("unknown experiment: " + name);
  return it->second;
}

std::string experiment_name(Experiment e) {
  for (const auto& [name, value] : experiment_table()) {
    if (value == e) return name;
  }
  return "unknown";
}

std::map<std::string, Rational> default_tolerances() {
  return {
      {"theorem2", Rational(1, 200)}, {"backward", Rational(1, 200)}, {"weak-limit", Rational(1, 100)},
      {"theorem3", Rational(3, 200)}, {"theorem4", Rational(1, 20)},  {"pairwise", Rational(1, 50)},
      {"mc-sigmas", Rational(4)},
  };
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig cfg) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") {
        cfg.experiment = parse_experiment(value.get<std::string>());
      } else if (key == "plan") {
        if (value.is_string()) {
          cfg.plan_path = value.get<std::string>();
          cfg.plan_inline.reset();
        } else {
          cfg.plan_inline = value;
          cfg.plan_path.reset();
        }
      } else if (key == "sets") {
        cfg.sets.clear();
        for (const auto& s : value) cfg.sets.push_back(s.is_string() ? s.get<std::string>() : s.dump());
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "depth") {
        cfg.depth = value.get<int>();
      } else if (key == "samples") {
        cfg.samples = value.get<std::uint64_t>();
      } else if (key == "m_max" || key == "m-max") {
        cfg.m_max = value.get<int>();
      } else if (key == "first_stage") {
        cfg.first_stage = value.get<int>();
      } else if (key == "last_stage") {
        cfg.last_stage = value.get<int>();
      } else if (key == "block_n") {
        cfg.block_n = value.get<std::int64_t>();
      } else if (key == "measure") {
        cfg.measure = value.is_string() ? value.get<std::string>() : value.dump();
      } else if (key == "tolerances") {
        for (const auto& [k, v] : value.items()) cfg.tolerances[k] = v.is_string() ? v.get<std::string>() : v.dump();
      } else if (key == "out_csv" || key == "out-csv") {
        cfg.out_csv = value.get<std::string>();
      } else if (key == "out_json" || key == "out-json") {
        cfg.out_json = value.get<std::string>();
      } else {
        throw ParseError("config: unknown key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
  RunConfig cfg = config_from_json(j, std::move(base));
  // A relative plan path in a config file is relative to that file.
  if (j.is_object() && j.contains("plan") && j["plan"].is_string()) {
    const std::filesystem::path plan = *cfg.plan_path;
    if (plan.is_relative()) cfg.plan_path = (std::filesystem::path(path).parent_path() / plan).string();
  }
  return cfg;
}

namespace {

// Built-in plans used when no plan is given.
SpacerPlan default_plan(Experiment e) {
  switch (e) {
    case Experiment::kTheorem3:
      return SpacerPlan::cycling(5, 14);
    case Experiment::kTheorem4: {
      SpacerPlan p;
      p.stages.push_back({1, 1, std::nullopt});
      return p;
    }
    default: {
      const std::vector<std::int64_t> ones(14, 1);
      return SpacerPlan::blocks(ones);
    }
  }
}

struct Window {
  int first;
  int last;
};

Window default_window(Experiment e) {
  switch (e) {
    case Experiment::kTheorem3:
    case Experiment::kTheorem4:
      return {4, 12};
    default:
      return {3, 8};
  }
}

struct Context {
  const RunConfig& cfg;
  std::map<std::string, Rational> tol;
  nlohmann::json summary;
  std::ostringstream csv;
  bool pass = false;
};

SpacerPlan resolve_plan(const RunConfig& cfg) {
  if (cfg.plan_path) return SpacerPlan::load(*cfg.plan_path);
  if (cfg.plan_inline) return SpacerPlan::from_json(*cfg.plan_inline);
  return default_plan(cfg.experiment);
}

LevelSet parse_level_set(const Tower& tower, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("level set literal: " + std::string(e.what()));
  }
  return LevelSet::from_json(tower, j);
}

Character parse_character(const std::string& text) {
  if (text.find("character:") != std::string::npos || text.find("cylinder:") != std::string::npos) {
    const SetSpec spec = parse_set_spec(text);
    const auto* cs = std::get_if<CharacterSet>(&spec);
    if (!cs) throw ParseError("theorem1 needs a character set");
    return cs->chi;
  }
  return Character{parse_support_literal(text)};
}

void run_theorem1(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.sets.size() > 1) throw ParseError("theorem1 takes at most one character");
  const Character chi = cfg.sets.empty() ? Character{LaurentPoly2::monomial(0, 0)} : parse_character(cfg.sets[0]);
  const Theorem1Report report = theorem1_certificate(chi, cfg.m_max);
  const double sigmas = to_double(ctx.tol.at("mc-sigmas"));

  bool mc_ok = true;
  nlohmann::json rows = nlohmann::json::array();
  ctx.csv << "m,forward_exact,backward_exact,pair1_nontrivial,pair2_nontrivial,backward_mc,backward_mc_stderr,mc_within\n";
  for (const auto& row : report.rows) {
    std::string mc_value = "", mc_err = "", mc_within = "";
    if (cfg.samples > 0) {
      const std::int64_t n = shift_for(row.m, ShiftReading::kPowerOfTwo);
      const ShiftedSet sets[] = {{CharacterSet{chi}, {0, 0}}, {CharacterSet{chi}, {0, -n}}, {CharacterSet{chi}, {-n, 0}}};
      const auto est = mc_correlation(sets, cfg.samples, cfg.seed + static_cast<std::uint64_t>(row.m));
      const double exact = to_double(row.backward);
      const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(cfg.samples));
      const bool within = std::abs(to_double(est.estimate) - exact) <= sigmas * se;
      mc_ok = mc_ok && within;
      mc_value = to_string(est.estimate);
      std::ostringstream e;
      e << se;
      mc_err = e.str();
      mc_within = within ? "1" : "0";
    }
    ctx.csv << row.m << ',' << to_string(row.forward) << ',' << to_string(row.backward) << ','
            << (row.pair1_nontrivial ? 1 : 0) << ',' << (row.pair2_nontrivial ? 1 : 0) << ',' << mc_value << ','
            << mc_err << ',' << mc_within << '\n';
    rows.push_back({{"m", row.m}, {"forward", to_string(row.forward)}, {"backward", to_string(row.backward)}});
  }
  ctx.summary["character"] = format_support_literal(chi.poly);
  ctx.summary["measure_a0"] = to_string(report.measure);
  ctx.summary["backward_threshold"] =
      report.backward_threshold ? nlohmann::json(*report.backward_threshold) : nlohmann::json(nullptr);
  ctx.summary["mc_agrees"] = mc_ok;
  ctx.summary["rows"] = std::move(rows);
  ctx.pass = report.pass && mc_ok;
}

nlohmann::json sets_json(std::initializer_list<std::reference_wrapper<const LevelSet>> sets) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : sets) out.push_back(s.get().to_json());
  return out;
}

// Up to `count` sets: given literals (one literal is reused for all), else random stage-2 sets.
std::vector<LevelSet> table_sets(const Tower& tower, const RunConfig& cfg, std::size_t count) {
  std::vector<LevelSet> sets;
  if (cfg.sets.empty()) {
    for (std::size_t i = 0; i < count; ++i) sets.push_back(random_level_set(tower, 2, cfg.seed, i));
  } else if (cfg.sets.size() == 1) {
    sets.assign(count, parse_level_set(tower, cfg.sets[0]));
  } else if (cfg.sets.size() == count) {
    for (const auto& s : cfg.sets) sets.push_back(parse_level_set(tower, s));
  } else {
    throw ParseError("expected 1 or " + std::to_string(count) + " --set values");
  }
  return sets;
}

void run_table(Context& ctx, const Tower& tower, Window w) {
  const auto& cfg = ctx.cfg;
  TableOptions opt;
  opt.first_stage = w.first;
  opt.last_stage = w.last;
  opt.depth = cfg.depth;
  std::vector<ConvergenceRow> rows;
  Rational tol;
  if (cfg.experiment == Experiment::kWeakLimit) {
    const auto sets = table_sets(tower, cfg, 2);
    rows = weak_limit_check(tower, sets[0], sets[1], opt);
    tol = ctx.tol.at("weak-limit");
    ctx.summary["sets"] = sets_json({sets[0], sets[1]});
  } else {
    const auto sets = table_sets(tower, cfg, 3);
    const bool forward = cfg.experiment == Experiment::kTheorem2;
    rows = forward ? theorem2_table(tower, cfg.block_n, sets[0], sets[1], sets[2], opt)
                   : backward_table(tower, cfg.block_n, sets[0], sets[1], sets[2], opt);
    tol = ctx.tol.at(forward ? "theorem2" : "backward");
    ctx.summary["block_n"] = cfg.block_n;
    ctx.summary["sets"] = sets_json({sets[0], sets[1], sets[2]});
  }
  write_table_csv(ctx.csv, rows, tol);
  ctx.summary["result"] = table_summary(rows, tol);
  ctx.pass = judge_table(rows, tol).pass();
}

void run_asymmetry(Context& ctx, const Tower& tower, Window w) {
  const auto& cfg = ctx.cfg;
  AsymmetryOptions opt;
  opt.first_stage = w.first;
  opt.last_stage = w.last;
  opt.depth = cfg.depth;
  opt.pairwise_tolerance = ctx.tol.at("pairwise");
  AsymmetryReport report;
  if (cfg.experiment == Experiment::kTheorem3) {
    opt.tolerance = ctx.tol.at("theorem3");
    std::vector<LevelSet> sets;
    if (cfg.sets.empty()) {
      sets.push_back(random_level_set_with_measure(tower, 3, parse_rational(cfg.measure), cfg.seed, 0));
    } else {
      for (const auto& s : cfg.sets) sets.push_back(parse_level_set(tower, s));
    }
    if (sets.size() == 1) {
      report = theorem3_run(tower, sets[0], opt);
      ctx.summary["sets"] = sets_json({sets[0]});
    } else if (sets.size() == 3) {
      report = theorem3_run(tower, sets[0], sets[1], sets[2], opt);
      ctx.summary["sets"] = sets_json({sets[0], sets[1], sets[2]});
    } else {
      throw ParseError("theorem3 takes 1 or 3 --set values");
    }
  } else {
    opt.tolerance = ctx.tol.at("theorem4");
    if (cfg.sets.size() > 1) throw ParseError("theorem4 takes at most one --set value");
    const std::int64_t mid = tower.height(2) / 2;
    const LevelSet a = cfg.sets.empty() ? LevelSet::of_levels(tower, 2, std::span(&mid, 1)) : parse_level_set(tower, cfg.sets[0]);
    report = theorem4_run(tower, a, opt);
    ctx.summary["sets"] = sets_json({a});
  }
  write_asymmetry_csv(ctx.csv, report);
  ctx.summary["result"] = asymmetry_summary(report);
  ctx.pass = report.pass;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  RunOutcome outcome;
  try {
    Context ctx{cfg, default_tolerances(), {}, {}, false};
    nlohmann::json tol_echo = nlohmann::json::object();
    for (const auto& [key, text] : cfg.tolerances) {
      if (!ctx.tol.contains(key)) throw ParseError("unknown tolerance key: " + key);
      ctx.tol[key] = parse_rational(text);
      if (ctx.tol[key] < 0) throw ParseError("tolerance must be nonnegative: " + key);
      tol_echo[key] = text;
    }
    for (const auto& [key, value] : ctx.tol) {
      if (!tol_echo.contains(key)) tol_echo[key] = to_string(value);
    }
    if (cfg.depth < 1) throw ParseError("depth must be positive");

    ctx.summary["experiment"] = experiment_name(cfg.experiment);
    ctx.summary["version"] = kVersion;
    ctx.summary["seed"] = cfg.seed;
    ctx.summary["depth"] = cfg.depth;
    ctx.summary["tolerances"] = tol_echo;

    if (cfg.experiment == Experiment::kTheorem1) {
      ctx.summary["m_max"] = cfg.m_max;
      ctx.summary["samples"] = cfg.samples;
      run_theorem1(ctx);
    } else {
      const SpacerPlan plan = resolve_plan(cfg);
      const Tower tower = Tower::build_max(plan);
      Window w = default_window(cfg.experiment);
      if (cfg.first_stage) w.first = *cfg.first_stage;
      if (cfg.last_stage) w.last = *cfg.last_stage;
      if (w.first < 0 || w.last < w.first) throw ParseError("invalid stage window");
      ctx.summary["plan"] = plan.to_json();
      ctx.summary["plan_class"] = tower.finite() ? "finite" : "infinite";
      if (tower.finite()) ctx.summary["total_measure"] = to_string(*tower.total_measure());
      ctx.summary["stages"] = {w.first, w.last};
      if (cfg.experiment == Experiment::kTheorem3 || cfg.experiment == Experiment::kTheorem4) {
        if (cfg.experiment == Experiment::kTheorem3) ctx.summary["measure"] = cfg.measure;
        run_asymmetry(ctx, tower, w);
      } else {
        run_table(ctx, tower, w);
      }
    }
    ctx.summary["verdict"] = ctx.pass ? "PASS" : "FAIL";
    outcome.summary = std::move(ctx.summary);
    outcome.csv = ctx.csv.str();
    outcome.exit_code = ctx.pass ? kExitPass : kExitFail;
    if (cfg.out_csv) write_file(*cfg.out_csv, outcome.csv);
    if (cfg.out_json) write_file(*cfg.out_json, outcome.summary.dump(2) + "\n");
  } catch (const ResourceError& e) {
    log << "resource limit: " << e.what() << '\n';
    outcome.exit_code = kExitResource;
  } catch (const std::invalid_argument& e) {
    log << "invalid configuration: " << e.what() << '\n';
    outcome.exit_code = kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    log << "invalid configuration: " << e.what() << '\n';
    outcome.exit_code = kExitInvalid;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = kExitInvalid;
  }
  return outcome;
}

int describe_plan(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const SpacerPlan plan = SpacerPlan::load(path);
    const Tower tower = Tower::build_max(plan, {static_cast<int>(plan.stages.size()), std::int64_t{1} << 62});
    out << "stage,N,L,H,r,h,w,mu\n";
    for (int j = 0; j <= tower.top_stage(); ++j) {
      const TowerStage& st = tower.stage(j);
      const StageSpec& spec = tower.spec(j);
      out << j << ',';
      if (j < static_cast<int>(plan.stages.size())) {
        out << spec.N << ',' << spec.L << ',' << (spec.H ? std::to_string(*spec.H) : "auto-height") << ','
            << spec.cuts();
      } else {
        out << ",,,";
      }
      out << ',' << st.height << ',' << to_string(st.width) << ',' << to_string(st.measure) << '\n';
    }
    out << "class," << (tower.finite() ? "finite" : "infinite") << '\n';
    if (tower.finite()) out << "limit_measure," << to_string(*tower.total_measure()) << '\n';
    return kExitPass;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    err << "invalid plan: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace asym
