// catsim: bichromatic spin-dependent force experiments on a single trapped
// ion. Subcommands regenerate the scan experiments from config files, check
// the closed-form model against the integrated dynamics, and fit scan data.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "catsim/cli_commands.hpp"

namespace {

struct ScanArgs {
  std::string config;
  catsim::CliOverrides overrides;
};

void add_override_flags(CLI::App* cmd, ScanArgs& args) {
  cmd->add_option("--config", args.config, "run configuration file")
      ->required();
  cmd->add_option("--seed", args.overrides.seed, "override the config seed");
  cmd->add_option("--shots", args.overrides.shots,
                  "override shots per point (0 = exact model)");
  cmd->add_option("--out", args.overrides.out_dir,
                  "override the output directory");
  cmd->add_option("--engine", args.overrides.engine,
                  "override the engine {closed,oracle}");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-ion bichromatic-force experiment toolkit"};
  app.require_subcommand(1);

  ScanArgs time_args, freq_args, phase_args, compare_args;
  auto* timescan =
      app.add_subcommand("timescan", "P_down vs force duration");
  add_override_flags(timescan, time_args);
  auto* freqscan =
      app.add_subcommand("freqscan", "P_down vs force detuning");
  add_override_flags(freqscan, freq_args);
  auto* phasescan =
      app.add_subcommand("phasescan", "echo fringe vs analysis phase");
  add_override_flags(phasescan, phase_args);
  auto* compare = app.add_subcommand(
      "compare-oracle", "closed form vs integrated dynamics on a coarse grid");
  add_override_flags(compare, compare_args);

  std::string fit_data, fit_spec;
  std::optional<std::string> fit_out;
  auto* fit_cmd = app.add_subcommand("fit", "least-squares parameter recovery");
  fit_cmd->add_option("--data", fit_data, "scan data (.json or .csv)")
      ->required();
  fit_cmd->add_option("--fitspec", fit_spec, "fit specification (.json)")
      ->required();
  fit_cmd->add_option("--out", fit_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (timescan->parsed()) {
    return catsim::cmd_scan(catsim::ScanKind::Time, time_args.config,
                            time_args.overrides, std::cerr);
  }
  if (freqscan->parsed()) {
    return catsim::cmd_scan(catsim::ScanKind::Detuning, freq_args.config,
                            freq_args.overrides, std::cerr);
  }
  if (phasescan->parsed()) {
    return catsim::cmd_scan(catsim::ScanKind::Phase, phase_args.config,
                            phase_args.overrides, std::cerr);
  }
  if (compare->parsed()) {
    return catsim::cmd_compare_oracle(compare_args.config,
                                      compare_args.overrides, std::cout,
                                      std::cerr);
  }
  if (fit_cmd->parsed()) {
    return catsim::cmd_fit(fit_data, fit_spec, fit_out, std::cout, std::cerr);
  }
  return 1;
}
