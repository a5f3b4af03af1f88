#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "icbd/detectors.hpp"
#include "icbd/scenario.hpp"

namespace icbd {

/// Monte Carlo budget and experiment description.
struct McConfig {
  std::uint64_t master_seed = 1;
  std::size_t trials_pfa = 0;  // calibration trials; 100/pfa when built from a run config
  std::size_t trials_pd = 10000;
  double pfa = 1e-4;
  std::vector<double> esnr_grid_db;
  std::vector<DetectorKind> detectors;
  int workers = 0;  // 0 = all hardware threads

  bool operator==(const McConfig&) const = default;
};

/// One (eSNR, detector) cell of the output table.
struct PerformancePoint {
  double esnr_db = 0.0;
  DetectorKind kind = DetectorKind::IcbdGlrtHe;
  double pd_mc = 0.0;
  std::optional<double> pd_theory;  // absent when no analytic law applies
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Raw statistic values per requested detector over `trials` independent
/// trials. Trial i consumes the stream derived from (master_seed, phase, i),
/// so results are bitwise independent of the worker count.
std::vector<std::vector<double>> mc_detector_samples(
    const Scenario& s, std::span<const DetectorKind> kinds, Hypothesis hypothesis,
    double esnr_linear, std::size_t trials, std::uint64_t master_seed,
    std::string_view phase, int workers);

/// Exceedance counts against per-detector thresholds over fresh trials.
std::vector<std::size_t> mc_exceedance_counts(
    const Scenario& s, std::span<const DetectorKind> kinds,
    std::span<const double> thresholds, Hypothesis hypothesis, double esnr_linear,
    std::size_t trials, std::uint64_t master_seed, std::string_view phase,
    int workers);

/// Loss-factor samples (for distribution-law validation).
std::vector<double> mc_loss_factor_samples(const Scenario& s, Hypothesis hypothesis,
                                           double esnr_linear, std::size_t trials,
                                           std::uint64_t master_seed,
                                           std::string_view phase, int workers);

/// k-th largest element (k >= 1).
double kth_largest(std::vector<double> values, std::size_t k);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};
/// 95% Wilson score interval by default.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials,
                               double z = 1.959963984540054);

/// Threshold calibration: evaluates trials_pfa independent H0 trials and
/// returns the k-th largest statistic with k = round(pfa * trials_pfa).
double calibrate_threshold(const Scenario& s, DetectorKind kind, const McConfig& cfg);
/// Same, for several detectors sharing one set of trials.
std::vector<double> calibrate_thresholds(const Scenario& s,
                                         std::span<const DetectorKind> kinds,
                                         const McConfig& cfg);

/// PD sweep over the eSNR grid (dB) at a fixed threshold.
std::vector<PerformancePoint> estimate_pd(const Scenario& s, DetectorKind kind,
                                          double threshold,
                                          std::span<const double> esnr_grid_db,
                                          const McConfig& cfg);

struct DetectorRun {
  DetectorKind kind = DetectorKind::IcbdGlrtHe;
  double threshold = 0.0;
  std::vector<PerformancePoint> points;
};

struct ExperimentResult {
  std::vector<DetectorRun> runs;
};

/// One calibration plus one PD sweep per requested detector, with trials
/// shared across detectors per phase.
ExperimentResult run_experiment(const Scenario& s, const McConfig& cfg);

}  // namespace icbd
