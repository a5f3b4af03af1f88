#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "icbd/commands.hpp"

namespace {

void add_run_options(CLI::App* cmd, icbd::RunOptions& options,
                     std::optional<std::uint64_t>& seed,
                     std::optional<std::string>& out) {
  cmd->add_option("--config", options.config_path, "run configuration file")
      ->required();
  cmd->add_option("--seed", seed, "override the Monte Carlo master seed");
  cmd->add_option("--workers", options.workers,
                  "worker threads (0 = all hardware threads)");
  cmd->add_option("--out", out, "override the output CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ICBD subspace-signal detection toolkit"};
  app.require_subcommand(1);

  icbd::RunOptions run_options;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "calibrate thresholds and sweep PD over the eSNR grid");
  add_run_options(simulate, run_options, seed, out);

  CLI::App* theory = app.add_subcommand(
      "theory", "analytic thresholds and PD curves (no sampling)");
  add_run_options(theory, run_options, seed, out);

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Monte Carlo threshold calibration only");
  add_run_options(calibrate, run_options, seed, out);

  icbd::VerifyOptions verify_options;
  std::optional<std::uint64_t> verify_seed;
  CLI::App* verify =
      app.add_subcommand("verify", "randomized identity oracles");
  verify->add_option("--instances", verify_options.instances,
                     "random instances per identity");
  verify->add_option("--seed", verify_seed, "seed for instance generation");
  verify->add_option("--tolerance", verify_options.tolerance,
                     "maximum relative residual");
  verify->add_option("--identity", verify_options.identity,
                     "run only this identity (projection_inverse, "
                     "whitening_equivalence, statistic_relations)");
  verify->add_option("--json", verify_options.json_path,
                     "write a machine-readable summary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      if (verify_seed) {
        verify_options.seed = *verify_seed;
      }
      std::cout << "verify: seed=" << verify_options.seed << "\n";
      return icbd::cmd_verify(verify_options, std::cout);
    }
    run_options.seed_override = seed;
    run_options.out_override = out;
    if (simulate->parsed()) {
      return icbd::cmd_simulate(run_options, std::cout);
    }
    if (theory->parsed()) {
      return icbd::cmd_theory(run_options, std::cout);
    }
    if (calibrate->parsed()) {
      return icbd::cmd_calibrate(run_options, std::cout);
    }
  } catch (const icbd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const icbd::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
