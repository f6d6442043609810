// SPDX-License-Identifier: Apache-2.0
//
// twoch-lab run --config <file> [--output <dir>] [--seed <int>]
// twoch-lab list-scenarios

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "twoch/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the two-component Camassa-Holm system"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  std::string config;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config, "INI config file")->required();
  run->add_option("--output", output, "Output directory (overrides [run] output)");
  run->add_option("--seed", seed, "Seed for randomized checks (overrides [run] seed)");

  app.add_subcommand("list-scenarios", "Describe the available scenarios");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-scenarios")) {
    std::cout << twoch::list_scenarios();
    return 0;
  }

  try {
    twoch::ExperimentSpec spec = twoch::parse_config(config);
    if (output) spec.output_dir = *output;
    if (seed) spec.seed = *seed;
    const int status = twoch::run(spec);
    std::cout << to_string(spec.scenario) << ": " << (status == 0 ? "PASS" : "FAIL") << " ("
              << (spec.output_dir / "report.json").string() << ")\n";
    return status;
  } catch (const twoch::PreconditionError& e) {
    std::cerr << "twoch-lab: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "twoch-lab: " << e.what() << '\n';
    return 1;
  }
}
