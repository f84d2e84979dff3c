#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liedyn/scenarios.hpp"

namespace liedyn {

struct RunConfig {
  std::string scenario;
  std::string mode;
  double T = 10.0;
  double h = 1e-3;
  std::map<std::string, double> parameters;
  std::map<std::string, std::vector<double>> initial;
  std::vector<std::string> formats{"csv", "json"};
  std::string output_dir;
  bool strict = false;
};

/// Loads the sectioned key=value format, or JSON when the path ends in
/// ".json", then applies `key=value` overrides (dotted paths reach the
/// parameters and initial sections). The result is validated: unknown keys,
/// bad numbers, impossible horizons, and unsupported scenario/mode pairs all
/// raise ConfigError carrying the offending key path.
RunConfig parse_config(const std::optional<std::string>& path,
                       const std::vector<std::string>& overrides);

/// Re-checks an assembled config (parse_config calls this internally).
void validate_config(const RunConfig& config);

/// Initial state from the config's `initial` section: either a raw `xi`
/// coefficient vector or scenario-specific fields layered over the mode
/// defaults; constraint parametrizations keep the state on the constraint.
State resolve_initial(const ScenarioSpec& spec, const RunConfig& config);

struct DiagnosticStat {
  double max = 0.0;
  double mean = 0.0;
};

struct RunSummary {
  State final_state;
  long steps = 0;
  std::map<std::string, DiagnosticStat> diagnostics;
  std::vector<std::string> budget_violations;
  double wall_seconds = 0.0;  // reported on stderr only, never serialized
  RunConfig config;
  std::string version;
};

/// Budget policy: orthonormality defect stays within 1e-10 on every run;
/// constraint residual stays within 1e-6 on nonholonomic and closed_loop
/// runs. Pure function of the collected statistics so the policy is testable
/// without manufacturing a failing integration.
std::vector<std::string> check_budgets(const std::string& mode,
                                       const std::map<std::string, DiagnosticStat>& stats);

/// Integrates the configured run and writes trajectory.csv / trajectory.json
/// (per `formats`) plus summary.json into the output directory. Outputs are
/// byte-identical across repeated runs of the same config and build.
RunSummary execute_run(const RunConfig& config);

/// Columns and rows of a simulated trajectory, laid out exactly like the CSV
/// output but kept in memory (`output_dir` and `formats` are ignored).
struct TrajectoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
TrajectoryTable run_table(const RunConfig& config);

/// Builds the named scenario, runs its property suite, and writes report.txt
/// into the output directory.
VerifyReport run_verify(const std::string& scenario, int samples, std::uint64_t seed,
                        const std::string& out_dir);

/// Machine-readable scenario registry (names plus parameter defaults).
std::string list_scenarios_json();

std::string version_string();

}  // namespace liedyn
