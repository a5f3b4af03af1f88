#include "icbd/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "icbd/distributions.hpp"
#include "icbd/mc.hpp"

namespace icbd {

namespace {

std::string format_sig(double v, int precision) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

RunConfig load_with_overrides(const RunOptions& options) {
  RunConfig cfg = load_run_config(options.config_path);
  if (options.seed_override) {
    cfg.mc.master_seed = *options.seed_override;
  }
  if (options.out_override) {
    cfg.output.csv = *options.out_override;
  }
  cfg.mc.workers = options.workers;
  return cfg;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write output file '" + path + "'");
  }
  return out;
}

void write_seed_header(std::ostream& out, const RunConfig& cfg) {
  out << "# master_seed=" << cfg.mc.master_seed
      << " subspace_seed=" << cfg.scenario.subspace_seed << "\n";
}

/// Analytic threshold for a detector under this scenario, when a law applies.
std::optional<double> analytic_threshold(const Scenario& s, DetectorKind kind,
                                         double pfa) {
  DetectorKind law_kind = kind;
  if (requires_full_scm(kind)) {
    if (s.training_has_interference() || s.L() < s.N()) {
      return std::nullopt;
    }
    law_kind = icbd_counterpart(kind);
  }
  if (s.sigma2() != 1.0 && law_kind != DetectorKind::IcbdPhe) {
    return std::nullopt;
  }
  const DetectorDims dims{s.N(), s.L(), s.p(), s.q()};
  return threshold_theoretical(law_kind, dims, pfa);
}

}  // namespace

int cmd_simulate(const RunOptions& options, std::ostream& log) {
  const RunConfig cfg = load_with_overrides(options);
  const Scenario scenario = make_scenario(cfg.scenario);

  log << "simulate: " << cfg.mc.detectors.size() << " detector(s), "
      << cfg.mc.esnr_grid_db.size() << " grid point(s), master_seed="
      << cfg.mc.master_seed << "\n";

  const ExperimentResult result = run_experiment(scenario, cfg.mc);

  std::ofstream out = open_csv(cfg.output.csv);
  write_seed_header(out, cfg);
  out << "esnr_db,detector,pd_mc,ci_low,ci_high,pd_theory,threshold,trials\n";
  const int prec = cfg.output.precision;
  for (std::size_t g = 0; g < cfg.mc.esnr_grid_db.size(); ++g) {
    for (const DetectorRun& run : result.runs) {
      const PerformancePoint& point = run.points[g];
      out << format_sig(point.esnr_db, prec) << ',' << to_string(point.kind) << ','
          << format_sig(point.pd_mc, prec) << ',' << format_sig(point.ci_low, prec)
          << ',' << format_sig(point.ci_high, prec) << ',';
      if (point.pd_theory) {
        out << format_sig(*point.pd_theory, prec);
      }
      out << ',' << format_sig(run.threshold, prec) << ',' << cfg.mc.trials_pd
          << "\n";
    }
  }

  for (const DetectorRun& run : result.runs) {
    log << "  " << to_string(run.kind) << ": threshold "
        << format_sig(run.threshold, prec) << " (pfa " << cfg.mc.pfa << ", "
        << cfg.mc.trials_pfa << " trials)\n";
  }
  log << "wrote " << cfg.output.csv << "\n";
  return 0;
}

int cmd_theory(const RunOptions& options, std::ostream& log) {
  const RunConfig cfg = load_with_overrides(options);
  const Scenario scenario = make_scenario(cfg.scenario);
  const DetectorDims dims{scenario.N(), scenario.L(), scenario.p(), scenario.q()};

  struct TheoryRun {
    DetectorKind kind;
    double threshold;
    std::vector<double> pd;
  };
  std::vector<TheoryRun> runs;
  for (DetectorKind kind : cfg.mc.detectors) {
    const auto threshold = analytic_threshold(scenario, kind, cfg.mc.pfa);
    if (!threshold) {
      throw ValidationError(std::string("no analytic law applies to ") +
                            to_string(kind) + " under this scenario");
    }
    DetectorKind law_kind =
        requires_full_scm(kind) ? icbd_counterpart(kind) : kind;
    TheoryRun run{kind, *threshold, {}};
    run.pd.reserve(cfg.mc.esnr_grid_db.size());
    for (double esnr_db : cfg.mc.esnr_grid_db) {
      double rho = std::pow(10.0, esnr_db / 10.0);
      if (scenario.sigma2() != 1.0) {
        rho /= scenario.sigma2();
      }
      run.pd.push_back(pd_theoretical(law_kind, dims, rho, *threshold));
    }
    runs.push_back(std::move(run));
  }

  std::ofstream out = open_csv(cfg.output.csv);
  write_seed_header(out, cfg);
  out << "esnr_db,detector,pd_theory,threshold_theory\n";
  const int prec = cfg.output.precision;
  for (std::size_t g = 0; g < cfg.mc.esnr_grid_db.size(); ++g) {
    for (const TheoryRun& run : runs) {
      out << format_sig(cfg.mc.esnr_grid_db[g], prec) << ',' << to_string(run.kind)
          << ',' << format_sig(run.pd[g], prec) << ','
          << format_sig(run.threshold, prec) << "\n";
    }
  }
  log << "theory: wrote " << cfg.output.csv << "\n";
  return 0;
}

int cmd_calibrate(const RunOptions& options, std::ostream& log) {
  const RunConfig cfg = load_with_overrides(options);
  const Scenario scenario = make_scenario(cfg.scenario);

  const std::span<const DetectorKind> kinds(cfg.mc.detectors);
  const std::vector<double> thresholds = calibrate_thresholds(scenario, kinds, cfg.mc);
  const int prec = cfg.output.precision;

  log << "calibrate: pfa=" << cfg.mc.pfa << " trials=" << cfg.mc.trials_pfa
      << " master_seed=" << cfg.mc.master_seed << "\n";
  std::ostringstream table;
  table << "detector,threshold_mc,threshold_theory,pfa,trials\n";
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    const auto theory = analytic_threshold(scenario, kinds[d], cfg.mc.pfa);
    table << to_string(kinds[d]) << ',' << format_sig(thresholds[d], prec) << ',';
    if (theory) {
      table << format_sig(*theory, prec);
    }
    table << ',' << format_sig(cfg.mc.pfa, prec) << ',' << cfg.mc.trials_pfa << "\n";
  }
  log << table.str();

  if (options.out_override || !cfg.output.csv.empty()) {
    std::ofstream out = open_csv(cfg.output.csv);
    write_seed_header(out, cfg);
    out << table.str();
    log << "wrote " << cfg.output.csv << "\n";
  }
  return 0;
}

int cmd_verify(const VerifyOptions& options, std::ostream& log) {
  std::vector<IdentityReport> reports;
  const auto wants = [&](std::string_view id) {
    return !options.identity || *options.identity == id;
  };

  if (wants("projection_inverse")) {
    reports.push_back(check_projection_inverse(24, 6, options.seed,
                                               options.instances, options.tolerance));
  }
  if (wants("whitening_equivalence")) {
    reports.push_back(check_whitening_equivalence(
        12, 16, 2, 3, options.seed, options.instances, options.tolerance));
  }
  if (wants("statistic_relations")) {
    reports.push_back(check_statistic_relations(
        options.seed, options.instances, std::min(options.tolerance, 1e-10)));
  }
  if (reports.empty()) {
    throw ValidationError("unknown identity '" + *options.identity +
                          "' (use projection_inverse, whitening_equivalence, or "
                          "statistic_relations)");
  }

  bool all_pass = true;
  log << std::left << std::setw(24) << "identity" << std::setw(10) << "instances"
      << std::setw(16) << "max_residual" << std::setw(12) << "tolerance"
      << "status\n";
  for (const IdentityReport& report : reports) {
    all_pass = all_pass && report.pass;
    log << std::left << std::setw(24) << report.identity_id << std::setw(10)
        << report.instances << std::setw(16)
        << format_sig(report.max_relative_residual, 3) << std::setw(12)
        << format_sig(report.tolerance, 3) << (report.pass ? "pass" : "FAIL");
    if (!report.pass) {
      log << " (worst instance " << report.worst_instance << ", seed "
          << options.seed << ")";
    }
    log << "\n";
  }

  if (options.json_path) {
    nlohmann::json summary = nlohmann::json::array();
    for (const IdentityReport& report : reports) {
      summary.push_back({{"identity", report.identity_id},
                         {"instances", report.instances},
                         {"max_relative_residual", report.max_relative_residual},
                         {"tolerance", report.tolerance},
                         {"worst_instance", report.worst_instance},
                         {"pass", report.pass}});
    }
    std::ofstream out(*options.json_path);
    if (!out) {
      throw ValidationError("cannot write summary file '" + *options.json_path + "'");
    }
    out << summary.dump(2) << "\n";
  }
  return all_pass ? 0 : 2;
}

}  // namespace icbd
