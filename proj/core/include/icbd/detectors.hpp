#pragma once

#include <optional>
#include <string_view>

#include "icbd/scenario.hpp"
#include "icbd/types.hpp"

namespace icbd {

/// The ten statistics: six ICBD names over four distinct formulas (the three
/// PHE variants coincide), plus the four conventional full-space detectors.
enum class DetectorKind {
  IcbdGlrtHe,
  IcbdRaoHe,
  IcbdWaldHe,
  IcbdPhe,
  ConvGlrtHe,
  ConvRaoHe,
  ConvWaldHe,
  ConvPhe,
};

constexpr DetectorKind kAllDetectors[] = {
    DetectorKind::IcbdGlrtHe, DetectorKind::IcbdRaoHe, DetectorKind::IcbdWaldHe,
    DetectorKind::IcbdPhe,    DetectorKind::ConvGlrtHe, DetectorKind::ConvRaoHe,
    DetectorKind::ConvWaldHe, DetectorKind::ConvPhe,
};

const char* to_string(DetectorKind kind);
std::optional<DetectorKind> detector_from_string(std::string_view name);
bool is_icbd(DetectorKind kind);
/// Conventional kinds need an invertible full-space SCM, i.e. L >= N.
bool requires_full_scm(DetectorKind kind);
/// The ICBD statistic a conventional kind coincides with for L >= N and
/// interference-free training.
DetectorKind icbd_counterpart(DetectorKind kind);

/// Fixed per-problem geometry: an orthonormal complement basis of <J> and
/// the signal subspace projected into it. Computing this once per problem
/// keeps the per-trial work at reduced dimension.
struct IcbdGeometry {
  ComplexMatrix J_perp;  // N x (N-q)
  ComplexMatrix H_proj;  // (N-q) x p, = J_perp^H H
};

IcbdGeometry make_icbd_geometry(const ComplexMatrix& H, const ComplexMatrix& J,
                                const NumericPolicy& policy = default_policy());
/// Geometry over a caller-supplied complement basis (must satisfy
/// J_perp^H J_perp = I); every downstream statistic is invariant to that
/// basis choice.
IcbdGeometry icbd_geometry_with_basis(const ComplexMatrix& H, ComplexMatrix J_perp);

/// The two quadratic forms every ICBD statistic is built from, with the
/// statistics derived on demand.
struct IcbdStatistics {
  double signal_energy = 0.0;  // energy of the whitened data inside the signal subspace
  double total_energy = 0.0;   // total whitened-data energy

  double residual_energy() const {
    return total_energy > signal_energy ? total_energy - signal_energy : 0.0;
  }
  double glrt_he() const { return signal_energy / (1.0 + residual_energy()); }
  double rao_he() const {
    return signal_energy / ((1.0 + total_energy) * (1.0 + residual_energy()));
  }
  double wald_he() const { return signal_energy; }
  /// Ratio form; throws NumericalError on a degenerate (near-zero) test vector.
  double phe() const;
  double loss_factor() const { return 1.0 / (1.0 + residual_energy()); }
  double value(DetectorKind kind) const;
};

/// Per-trial ICBD state: projected data, reduced-dimension SCM, whitened
/// quantities, and the signal-subspace projector.
struct IcbdWorkspace {
  ComplexMatrix J_perp;    // complement basis used
  ComplexVector y;         // J_perp^H x
  ComplexMatrix Y_L;       // J_perp^H X_L
  ComplexMatrix S_Jperp;   // Y_L Y_L^H
  ComplexVector y_tilde;   // S_Jperp^{-1/2} y
  ComplexMatrix H_tilde;   // S_Jperp^{-1/2} J_perp^H H
  ComplexMatrix P_signal;  // projector onto <H_tilde>
  IcbdStatistics stats;
};

IcbdWorkspace build_workspace(const TrialData& trial, const IcbdGeometry& geometry,
                              const NumericPolicy& policy = default_policy());
IcbdWorkspace build_workspace(const TrialData& trial, const ComplexMatrix& H,
                              const ComplexMatrix& J,
                              const NumericPolicy& policy = default_policy());

double icbd_glrt_he(const IcbdWorkspace& w);
double icbd_rao_he(const IcbdWorkspace& w);
double icbd_wald_he(const IcbdWorkspace& w);
double icbd_phe(const IcbdWorkspace& w);
double loss_factor(const IcbdWorkspace& w);

/// Cholesky-based evaluation of the same two quadratic forms, without
/// materializing the workspace; used by the Monte Carlo engine. Agrees with
/// the workspace route to rounding because the statistics are invariant to
/// the whitening square root chosen.
IcbdStatistics evaluate_icbd(const ComplexVector& x, const ComplexMatrix& X_L,
                             const IcbdGeometry& geometry,
                             const NumericPolicy& policy = default_policy());
IcbdStatistics evaluate_icbd(const TrialData& trial, const IcbdGeometry& geometry,
                             const NumericPolicy& policy = default_policy());

/// Conventional full-space detectors (whiten by the SCM inverse square root).
struct ConvStatistics {
  double signal_energy = 0.0;           // whitened energy in the interference-rejected signal subspace
  double interference_free_energy = 0.0;  // whitened energy outside <J~>
  double joint_residual_energy = 0.0;   // whitened energy outside <[H~, J~]>

  double glrt_he() const {
    const double denom = 1.0 + interference_free_energy - signal_energy;
    return signal_energy / (denom > 1.0 ? denom : 1.0);
  }
  double rao_he() const {
    return signal_energy /
           ((1.0 + interference_free_energy) * (1.0 + joint_residual_energy));
  }
  double wald_he() const { return signal_energy; }
  double phe() const;
  double value(DetectorKind kind) const;
};

ConvStatistics evaluate_conventional(const ComplexVector& x, const ComplexMatrix& X_L,
                                     const ComplexMatrix& H, const ComplexMatrix& J,
                                     const NumericPolicy& policy = default_policy());

double conv_glrt_he(const ComplexVector& x, const ComplexMatrix& X_L,
                    const ComplexMatrix& H, const ComplexMatrix& J);
double conv_rao_he(const ComplexVector& x, const ComplexMatrix& X_L,
                   const ComplexMatrix& H, const ComplexMatrix& J);
double conv_wald_he(const ComplexVector& x, const ComplexMatrix& X_L,
                    const ComplexMatrix& H, const ComplexMatrix& J);
double conv_phe(const ComplexVector& x, const ComplexMatrix& X_L,
                const ComplexMatrix& H, const ComplexMatrix& J);

}  // namespace icbd
