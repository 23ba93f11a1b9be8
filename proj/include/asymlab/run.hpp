#pragma once

// Configuration-driven experiment runner behind the asymlab command line.

#include "asymlab/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace asym {

enum class Experiment { kTheorem1, kTheorem2, kTheorem3, kTheorem4, kWeakLimit, kBackward };

Experiment parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitResource = 3;

inline constexpr const char* kVersion = "0.3.0";

struct RunConfig {
  Experiment experiment = Experiment::kTheorem1;
  std::optional<std::string> plan_path;
  std::optional<nlohmann::json> plan_inline;
  /// theorem1: a character support literal; otherwise level-set JSON literals.
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  int depth = 6;
  std::uint64_t samples = 1'000'000;
  int m_max = 12;
  std::optional<int> first_stage;
  std::optional<int> last_stage;
  std::int64_t block_n = 1;  // theorem2 / backward
  std::string measure = "1/5";  // theorem3 random set
  /// KEY -> value text, echoed verbatim into the summary.
  std::map<std::string, std::string> tolerances;
  std::optional<std::string> out_csv;
  std::optional<std::string> out_json;
};

/// Fields of a JSON config file; keys mirror the long flag names. A relative "plan"
/// path is taken relative to the config file.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Default tolerance for each key.
std::map<std::string, Rational> default_tolerances();

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json summary;
  std::string csv;
};

/// Runs the experiment and writes the requested files. Never throws: errors map to exit codes
/// and a message on `log`.
RunOutcome run(const RunConfig& config, std::ostream& log);

/// Per-stage table (N, L, H, r, h_j, w_j, mu_j) of a plan file and its measure class; returns an exit code.
int describe_plan(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace asym
