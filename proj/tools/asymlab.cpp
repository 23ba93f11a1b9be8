#include "asymlab/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric multiple-mixing experiments for rank-one and algebraic systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", asym::kVersion);

  auto* run_cmd = app.add_subcommand("run", "Run one experiment and write CSV / JSON reports");
  std::string config_path, experiment, plan, measure, out_csv, out_json;
  std::vector<std::string> sets, tolerances;
  std::uint64_t seed = 0, samples = 0;
  int depth = 0, m_max = 0, first_stage = 0, last_stage = 0;
  std::int64_t block_n = 0;
  run_cmd->add_option("--config", config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  run_cmd->add_option("--experiment", experiment, "theorem1 | theorem2 | theorem3 | theorem4 | weak-limit | backward");
  run_cmd->add_option("--plan", plan, "Spacer plan JSON file (built-in default per experiment)");
  run_cmd->add_option("--set", sets, "Set literal; repeatable (character support list or level-set JSON)");
  run_cmd->add_option("--seed", seed, "Seed for random sets and Monte Carlo");
  run_cmd->add_option("--depth", depth, "Evaluation depth: J = j + depth");
  run_cmd->add_option("--samples", samples, "Monte Carlo samples (theorem1; 0 disables)");
  run_cmd->add_option("--m-max", m_max, "Largest m for theorem1");
  run_cmd->add_option("--first-stage", first_stage, "First tested stage");
  run_cmd->add_option("--last-stage", last_stage, "Last tested stage");
  run_cmd->add_option("--block-n", block_n, "Block parameter N for theorem2 / backward");
  run_cmd->add_option("--measure", measure, "Normalized measure of the random theorem3 set");
  run_cmd->add_option("--tolerance", tolerances, "KEY=VALUE; repeatable");
  run_cmd->add_option("--out-csv", out_csv, "CSV report path");
  run_cmd->add_option("--out-json", out_json, "JSON summary path");

  auto* describe_cmd = app.add_subcommand("describe-plan", "Print the stage table of a plan file");
  std::string describe_path;
  describe_cmd->add_option("plan", describe_path, "Spacer plan JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : asym::kExitInvalid;
  }

  if (describe_cmd->parsed()) return asym::describe_plan(describe_path, std::cout, std::cerr);

  asym::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = asym::load_config(config_path);
    if (run_cmd->count("--experiment")) cfg.experiment = asym::parse_experiment(experiment);
    if (run_cmd->count("--plan")) {
      cfg.plan_path = plan;
      cfg.plan_inline.reset();
    }
    if (run_cmd->count("--set")) cfg.sets = sets;
    if (run_cmd->count("--seed")) cfg.seed = seed;
    if (run_cmd->count("--depth")) cfg.depth = depth;
    if (run_cmd->count("--samples")) cfg.samples = samples;
    if (run_cmd->count("--m-max")) cfg.m_max = m_max;
    if (run_cmd->count("--first-stage")) cfg.first_stage = first_stage;
    if (run_cmd->count("--last-stage")) cfg.last_stage = last_stage;
    if (run_cmd->count("--block-n")) cfg.block_n = block_n;
    if (run_cmd->count("--measure")) cfg.measure = measure;
    for (const auto& t : tolerances) {
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) throw asym::ParseError("--tolerance expects KEY=VALUE, got " + t);
      cfg.tolerances[t.substr(0, eq)] = t.substr(eq + 1);
    }
    if (run_cmd->count("--out-csv")) cfg.out_csv = out_csv;
    if (run_cmd->count("--out-json")) cfg.out_json = out_json;
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return asym::kExitInvalid;
  }

  const auto outcome = asym::run(cfg, std::cerr);
  if (outcome.exit_code == asym::kExitPass || outcome.exit_code == asym::kExitFail) {
    if (!cfg.out_csv) std::cout << outcome.csv;
    std::cerr << asym::experiment_name(cfg.experiment) << ": " << outcome.summary.value("verdict", "FAIL") << '\n';
  }
  return outcome.exit_code;
}
