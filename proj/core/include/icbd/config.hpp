#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "icbd/mc.hpp"
#include "icbd/scenario.hpp"

namespace icbd {

/// [scenario] section of a run configuration. Defaults describe the
/// sample-starved reference problem (N=24, L=23, p=2, q=6, epsilon=0.95).
struct ScenarioConfig {
  int N = 24;
  int L = 23;
  int p = 2;
  int q = 6;
  double epsilon = 0.95;
  double sigma2 = 1.0;
  Environment environment = Environment::HE;
  bool training_has_interference = false;
  double training_inr_db = 10.0;
  std::uint64_t subspace_seed = 1;
  std::optional<std::string> H_file;
  std::optional<std::string> J_file;
  std::optional<std::string> theta0_file;
  std::optional<std::string> phi_file;

  bool operator==(const ScenarioConfig&) const = default;
};

/// [output] section.
struct OutputConfig {
  std::string csv = "results.csv";
  int precision = 6;  // significant digits

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ScenarioConfig scenario;
  McConfig mc;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the sectioned key-value config format. Unknown sections or keys
/// and malformed values are rejected with the offending line number.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);

/// Builds the scenario: explicit subspace/coordinate files win when given,
/// anything missing is generated from the subspace seed.
Scenario make_scenario(const ScenarioConfig& cfg);

/// Complex cells rendered as "a+bi".
Complex parse_complex(std::string_view cell);
std::string format_complex(Complex z);

ComplexMatrix read_complex_csv(const std::string& path);
ComplexVector read_complex_vector_csv(const std::string& path);
void write_complex_csv(const std::string& path, const ComplexMatrix& m);

}  // namespace icbd
