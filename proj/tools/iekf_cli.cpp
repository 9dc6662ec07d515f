#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iekf/app/config.hpp"
#include "iekf/app/runner.hpp"

namespace app = iekf::app;

int main(int argc, char** argv) {
  CLI::App cli{"Iterated EKF on manifolds: synthetic attitude experiments"};
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> mode;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> variant;

  auto* run = cli.add_subcommand("run", "Run an experiment described by a YAML config");
  run->add_option("config", config_path, "Path to the run config")->required();
  run->add_option("--mode", mode, "single | monte-carlo | compare")
      ->check(CLI::IsMember({"single", "monte-carlo", "compare"}));
  run->add_option("--trials", trials, "Monte Carlo trial count")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Scenario seed");
  run->add_option("--output", output, "CSV output path");
  run->add_option("--variant", variant, "standard | qr | information")
      ->check(CLI::IsMember({"standard", "qr", "information"}));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::kExitUsage;
  }

  app::RunManifest manifest;
  try {
    manifest = app::parse_config(config_path);
  } catch (const app::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code();
  }
  if (mode) manifest.mode = *app::parse_mode(*mode);
  if (trials) manifest.trials = *trials;
  if (seed) manifest.scenario.seed = *seed;
  if (output) manifest.output_path = *output;
  if (variant) manifest.filter.update_variant = *app::parse_variant(*variant);

  return app::run(manifest, std::cout, std::cerr);
}
