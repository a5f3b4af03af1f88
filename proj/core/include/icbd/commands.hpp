#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "icbd/config.hpp"
#include "icbd/verify.hpp"

namespace icbd {

/// Options shared by the config-driven commands.
struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;  // replaces mc.master_seed
  std::optional<std::string> out_override;     // replaces output.csv
  int workers = 0;                             // 0 = all hardware threads
};

struct VerifyOptions {
  std::size_t instances = 1000;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::optional<std::string> identity;   // run only the named identity
  std::optional<std::string> json_path;  // machine-readable summary
};

/// Monte Carlo experiment: calibrates thresholds, sweeps the eSNR grid, and
/// writes the performance CSV. Returns a process exit code.
int cmd_simulate(const RunOptions& options, std::ostream& log);

/// Analytic-only counterpart: theoretical thresholds and PD curves.
int cmd_theory(const RunOptions& options, std::ostream& log);

/// Threshold calibration only; prints (and optionally writes) per-detector
/// thresholds next to their analytic values.
int cmd_calibrate(const RunOptions& options, std::ostream& log);

/// Identity oracles; exit code 0 iff every requested identity passes.
int cmd_verify(const VerifyOptions& options, std::ostream& log);

}  // namespace icbd
