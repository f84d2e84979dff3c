#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liedyn/runio.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lie group dynamics runner"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  bool strict = false;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate a scenario and write outputs");
  simulate->add_option("--config", config_path, "config file (key = value or .json)");
  simulate->add_option("--set", sets, "override, e.g. --set parameters.J2=5")->take_all();
  simulate->add_flag("--strict", strict, "exit nonzero when a diagnostic budget is exceeded");
  simulate->add_option("--out", out_dir, "output directory")->required();

  std::string scenario;
  std::uint64_t seed = 42;
  int samples = 1000;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "check scenario properties and write a report");
  verify->add_option("--scenario", scenario, "scenario name")->required();
  verify->add_option("--seed", seed, "sampling seed");
  verify->add_option("--samples", samples, "number of sampled states per property");
  verify->add_option("--out", verify_out, "output directory")->required();

  app.add_subcommand("list-scenarios", "print scenario names and default parameters as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) {
      liedyn::RunConfig config = liedyn::parse_config(config_path, sets);
      config.output_dir = out_dir;
      config.strict = strict;
      const liedyn::RunSummary summary = liedyn::execute_run(config);
      std::fprintf(stderr, "wall_seconds %.6f\n", summary.wall_seconds);
      for (const std::string& message : summary.budget_violations)
        std::cerr << "budget violation: " << message << "\n";
      return (!summary.budget_violations.empty() && config.strict) ? 1 : 0;
    }
    if (verify->parsed()) {
      const liedyn::VerifyReport report = liedyn::run_verify(scenario, samples, seed, verify_out);
      std::cout << liedyn::render_report(report);
      return report.all_pass ? 0 : 1;
    }
    std::cout << liedyn::list_scenarios_json();
    return 0;
  } catch (const liedyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
