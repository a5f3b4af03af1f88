#include "icbd/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>

#include "icbd/distributions.hpp"

namespace icbd {

namespace {

int resolve_workers(int workers, std::size_t trials) {
  if (workers < 1) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (workers < 1) {
    workers = 1;
  }
  const std::size_t cap = std::max<std::size_t>(trials, 1);
  return static_cast<int>(std::min<std::size_t>(workers, cap));
}

// Runs per_trial(i, trial) for i in [0, trials) across workers. Trial i is
// synthesized from the stream (master_seed, phase, i) no matter which worker
// picks it up; per_trial must only touch per-index state or atomics.
template <typename PerTrial>
void run_trials(const Scenario& s, Hypothesis hypothesis, double esnr_linear,
                std::size_t trials, std::uint64_t master_seed, std::string_view phase,
                int workers, PerTrial&& per_trial) {
  const int W = resolve_workers(workers, trials);
  if (W == 1) {
    for (std::size_t i = 0; i < trials; ++i) {
      StreamRng rng(master_seed, phase, i);
      const TrialData trial = synthesize_trial(s, esnr_linear, hypothesis, rng);
      per_trial(i, trial);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::size_t kChunk = 64;

  auto body = [&]() {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= trials) {
          return;
        }
        const std::size_t end = std::min(begin + kChunk, trials);
        for (std::size_t i = begin; i < end; ++i) {
          StreamRng rng(master_seed, phase, i);
          const TrialData trial = synthesize_trial(s, esnr_linear, hypothesis, rng);
          per_trial(i, trial);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
      next.store(trials);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(W);
  for (int w = 0; w < W; ++w) {
    pool.emplace_back(body);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

struct KindSplit {
  bool any_icbd = false;
  bool any_conv = false;
};

KindSplit split_kinds(std::span<const DetectorKind> kinds) {
  KindSplit split;
  for (DetectorKind kind : kinds) {
    (is_icbd(kind) ? split.any_icbd : split.any_conv) = true;
  }
  return split;
}

void check_kinds_supported(const Scenario& s, std::span<const DetectorKind> kinds) {
  for (DetectorKind kind : kinds) {
    if (requires_full_scm(kind) && s.L() < s.N()) {
      throw ValidationError(std::string(to_string(kind)) +
                            " requires L >= N (invertible SCM)");
    }
  }
}

}  // namespace

std::vector<std::vector<double>> mc_detector_samples(
    const Scenario& s, std::span<const DetectorKind> kinds, Hypothesis hypothesis,
    double esnr_linear, std::size_t trials, std::uint64_t master_seed,
    std::string_view phase, int workers) {
  check_kinds_supported(s, kinds);
  const KindSplit split = split_kinds(kinds);
  const IcbdGeometry geometry =
      icbd_geometry_with_basis(s.H(), s.interference_complement());

  std::vector<std::vector<double>> values(kinds.size());
  for (auto& v : values) {
    v.resize(trials);
  }

  run_trials(s, hypothesis, esnr_linear, trials, master_seed, phase, workers,
             [&](std::size_t i, const TrialData& trial) {
               IcbdStatistics icbd_stats;
               ConvStatistics conv_stats;
               if (split.any_icbd) {
                 icbd_stats = evaluate_icbd(trial, geometry);
               }
               if (split.any_conv) {
                 conv_stats = evaluate_conventional(trial.x, trial.X_L, s.H(), s.J());
               }
               for (std::size_t d = 0; d < kinds.size(); ++d) {
                 values[d][i] = is_icbd(kinds[d]) ? icbd_stats.value(kinds[d])
                                                  : conv_stats.value(kinds[d]);
               }
             });
  return values;
}

std::vector<std::size_t> mc_exceedance_counts(
    const Scenario& s, std::span<const DetectorKind> kinds,
    std::span<const double> thresholds, Hypothesis hypothesis, double esnr_linear,
    std::size_t trials, std::uint64_t master_seed, std::string_view phase,
    int workers) {
  if (kinds.size() != thresholds.size()) {
    throw ValidationError("mc_exceedance_counts: one threshold per detector required");
  }
  check_kinds_supported(s, kinds);
  const KindSplit split = split_kinds(kinds);
  const IcbdGeometry geometry =
      icbd_geometry_with_basis(s.H(), s.interference_complement());

  std::vector<std::atomic<std::size_t>> counts(kinds.size());
  for (auto& c : counts) {
    c.store(0);
  }

  run_trials(s, hypothesis, esnr_linear, trials, master_seed, phase, workers,
             [&](std::size_t, const TrialData& trial) {
               IcbdStatistics icbd_stats;
               ConvStatistics conv_stats;
               if (split.any_icbd) {
                 icbd_stats = evaluate_icbd(trial, geometry);
               }
               if (split.any_conv) {
                 conv_stats = evaluate_conventional(trial.x, trial.X_L, s.H(), s.J());
               }
               for (std::size_t d = 0; d < kinds.size(); ++d) {
                 const double value = is_icbd(kinds[d]) ? icbd_stats.value(kinds[d])
                                                        : conv_stats.value(kinds[d]);
                 if (value > thresholds[d]) {
                   counts[d].fetch_add(1, std::memory_order_relaxed);
                 }
               }
             });

  std::vector<std::size_t> out(kinds.size());
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    out[d] = counts[d].load();
  }
  return out;
}

std::vector<double> mc_loss_factor_samples(const Scenario& s, Hypothesis hypothesis,
                                           double esnr_linear, std::size_t trials,
                                           std::uint64_t master_seed,
                                           std::string_view phase, int workers) {
  const IcbdGeometry geometry =
      icbd_geometry_with_basis(s.H(), s.interference_complement());
  std::vector<double> values(trials);
  run_trials(s, hypothesis, esnr_linear, trials, master_seed, phase, workers,
             [&](std::size_t i, const TrialData& trial) {
               values[i] = evaluate_icbd(trial, geometry).loss_factor();
             });
  return values;
}

double kth_largest(std::vector<double> values, std::size_t k) {
  if (k < 1 || k > values.size()) {
    throw ValidationError("kth_largest: k out of range");
  }
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end(),
                   std::greater<>());
  return values[k - 1];
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0 || successes > trials) {
    throw ValidationError("wilson_interval: invalid counts");
  }
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

std::size_t calibration_order_statistic(const McConfig& cfg) {
  if (cfg.trials_pfa < 1) {
    throw ValidationError("calibration requires a positive trial budget");
  }
  const auto k = static_cast<std::size_t>(
      std::llround(cfg.pfa * static_cast<double>(cfg.trials_pfa)));
  if (k < 1) {
    throw ValidationError("trial budget too small for target PFA");
  }
  if (static_cast<double>(cfg.trials_pfa) < 10.0 / cfg.pfa) {
    std::cerr << "warning: trials_pfa below 10/pfa; threshold estimate will be noisy\n";
  }
  return k;
}

std::optional<double> theory_for_point(const Scenario& s, DetectorKind kind,
                                       double threshold, double esnr_linear) {
  DetectorKind law_kind = kind;
  if (requires_full_scm(kind)) {
    // The conventional statistics coincide with their reduced-dimension
    // counterparts only for interference-free training with L >= N.
    if (s.training_has_interference() || s.L() < s.N()) {
      return std::nullopt;
    }
    law_kind = icbd_counterpart(kind);
  }
  double rho = esnr_linear;
  if (s.sigma2() != 1.0) {
    // Only the scale-invariant PHE statistic keeps its law under a test
    // power mismatch; its effective eSNR rescales by 1/sigma2.
    if (law_kind != DetectorKind::IcbdPhe) {
      return std::nullopt;
    }
    rho /= s.sigma2();
  }
  const DetectorDims dims{s.N(), s.L(), s.p(), s.q()};
  return pd_theoretical(law_kind, dims, rho, threshold);
}

}  // namespace

std::vector<double> calibrate_thresholds(const Scenario& s,
                                         std::span<const DetectorKind> kinds,
                                         const McConfig& cfg) {
  const std::size_t k = calibration_order_statistic(cfg);
  const auto samples = mc_detector_samples(s, kinds, Hypothesis::H0, 0.0,
                                           cfg.trials_pfa, cfg.master_seed,
                                           "calibrate", cfg.workers);
  std::vector<double> thresholds(kinds.size());
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    thresholds[d] = kth_largest(samples[d], k);
  }
  return thresholds;
}

double calibrate_threshold(const Scenario& s, DetectorKind kind, const McConfig& cfg) {
  const DetectorKind kinds[] = {kind};
  return calibrate_thresholds(s, kinds, cfg)[0];
}

std::vector<PerformancePoint> estimate_pd(const Scenario& s, DetectorKind kind,
                                          double threshold,
                                          std::span<const double> esnr_grid_db,
                                          const McConfig& cfg) {
  const DetectorKind kinds[] = {kind};
  const double thresholds[] = {threshold};
  std::vector<PerformancePoint> points;
  points.reserve(esnr_grid_db.size());
  for (std::size_t g = 0; g < esnr_grid_db.size(); ++g) {
    const double esnr_linear = std::pow(10.0, esnr_grid_db[g] / 10.0);
    const auto counts = mc_exceedance_counts(
        s, kinds, thresholds, Hypothesis::H1, esnr_linear, cfg.trials_pd,
        cfg.master_seed, "pd/" + std::to_string(g), cfg.workers);
    PerformancePoint point;
    point.esnr_db = esnr_grid_db[g];
    point.kind = kind;
    point.pd_mc = static_cast<double>(counts[0]) / static_cast<double>(cfg.trials_pd);
    const WilsonInterval ci = wilson_interval(counts[0], cfg.trials_pd);
    point.ci_low = ci.low;
    point.ci_high = ci.high;
    point.pd_theory = theory_for_point(s, kind, threshold, esnr_linear);
    points.push_back(point);
  }
  return points;
}

ExperimentResult run_experiment(const Scenario& s, const McConfig& cfg) {
  ExperimentResult result;
  if (cfg.detectors.empty()) {
    return result;
  }
  const std::span<const DetectorKind> kinds(cfg.detectors);
  const std::vector<double> thresholds = calibrate_thresholds(s, kinds, cfg);

  result.runs.resize(kinds.size());
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    result.runs[d].kind = kinds[d];
    result.runs[d].threshold = thresholds[d];
    result.runs[d].points.reserve(cfg.esnr_grid_db.size());
  }

  for (std::size_t g = 0; g < cfg.esnr_grid_db.size(); ++g) {
    const double esnr_db = cfg.esnr_grid_db[g];
    const double esnr_linear = std::pow(10.0, esnr_db / 10.0);
    const auto counts = mc_exceedance_counts(
        s, kinds, thresholds, Hypothesis::H1, esnr_linear, cfg.trials_pd,
        cfg.master_seed, "pd/" + std::to_string(g), cfg.workers);
    for (std::size_t d = 0; d < kinds.size(); ++d) {
      PerformancePoint point;
      point.esnr_db = esnr_db;
      point.kind = kinds[d];
      point.pd_mc =
          static_cast<double>(counts[d]) / static_cast<double>(cfg.trials_pd);
      const WilsonInterval ci = wilson_interval(counts[d], cfg.trials_pd);
      point.ci_low = ci.low;
      point.ci_high = ci.high;
      point.pd_theory = theory_for_point(s, kinds[d], thresholds[d], esnr_linear);
      result.runs[d].points.push_back(point);
    }
  }
  return result;
}

}  // namespace icbd
