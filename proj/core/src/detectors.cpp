#include "icbd/detectors.hpp"

#include <cmath>

#include "icbd/linalg.hpp"

namespace icbd {

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::IcbdGlrtHe: return "ICBD_GLRT_HE";
    case DetectorKind::IcbdRaoHe: return "ICBD_RAO_HE";
    case DetectorKind::IcbdWaldHe: return "ICBD_WALD_HE";
    case DetectorKind::IcbdPhe: return "ICBD_PHE";
    case DetectorKind::ConvGlrtHe: return "CONV_GLRT_HE";
    case DetectorKind::ConvRaoHe: return "CONV_RAO_HE";
    case DetectorKind::ConvWaldHe: return "CONV_WALD_HE";
    case DetectorKind::ConvPhe: return "CONV_PHE";
  }
  return "UNKNOWN";
}

std::optional<DetectorKind> detector_from_string(std::string_view name) {
  for (DetectorKind kind : kAllDetectors) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

bool is_icbd(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::IcbdGlrtHe:
    case DetectorKind::IcbdRaoHe:
    case DetectorKind::IcbdWaldHe:
    case DetectorKind::IcbdPhe:
      return true;
    default:
      return false;
  }
}

bool requires_full_scm(DetectorKind kind) { return !is_icbd(kind); }

DetectorKind icbd_counterpart(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::ConvGlrtHe: return DetectorKind::IcbdGlrtHe;
    case DetectorKind::ConvRaoHe: return DetectorKind::IcbdRaoHe;
    case DetectorKind::ConvWaldHe: return DetectorKind::IcbdWaldHe;
    case DetectorKind::ConvPhe: return DetectorKind::IcbdPhe;
    default: return kind;
  }
}

double IcbdStatistics::phe() const {
  if (std::sqrt(total_energy) < default_policy().degenerate_norm) {
    throw NumericalError("degenerate test vector");
  }
  const double ratio = signal_energy / total_energy;
  return ratio < 1.0 ? ratio : 1.0;
}

double IcbdStatistics::value(DetectorKind kind) const {
  switch (kind) {
    case DetectorKind::IcbdGlrtHe: return glrt_he();
    case DetectorKind::IcbdRaoHe: return rao_he();
    case DetectorKind::IcbdWaldHe: return wald_he();
    case DetectorKind::IcbdPhe: return phe();
    default:
      throw ValidationError("IcbdStatistics: not an ICBD detector kind");
  }
}

IcbdGeometry make_icbd_geometry(const ComplexMatrix& H, const ComplexMatrix& J,
                                const NumericPolicy& policy) {
  if (H.rows() != J.rows()) {
    throw ValidationError("icbd geometry: H and J row counts differ");
  }
  IcbdGeometry g;
  g.J_perp = orth_complement(J, policy);
  g.H_proj = g.J_perp.adjoint() * H;
  return g;
}

IcbdGeometry icbd_geometry_with_basis(const ComplexMatrix& H, ComplexMatrix J_perp) {
  if (H.rows() != J_perp.rows()) {
    throw ValidationError("icbd geometry: H and J_perp row counts differ");
  }
  IcbdGeometry g;
  g.H_proj = J_perp.adjoint() * H;
  g.J_perp = std::move(J_perp);
  return g;
}

namespace {

void check_trial_against_geometry(const TrialData& trial, const IcbdGeometry& geometry) {
  if (trial.x.size() != geometry.J_perp.rows() ||
      trial.X_L.rows() != geometry.J_perp.rows()) {
    throw ValidationError("icbd workspace: trial dimensions do not match geometry");
  }
  if (trial.X_L.cols() < geometry.J_perp.cols()) {
    throw ValidationError("icbd workspace: training size must satisfy L >= N - q");
  }
}

}  // namespace

IcbdWorkspace build_workspace(const TrialData& trial, const IcbdGeometry& geometry,
                              const NumericPolicy& policy) {
  check_trial_against_geometry(trial, geometry);

  IcbdWorkspace w;
  w.J_perp = geometry.J_perp;
  w.y = geometry.J_perp.adjoint() * trial.x;
  w.Y_L = geometry.J_perp.adjoint() * trial.X_L;
  w.S_Jperp = sample_covariance(w.Y_L);

  ComplexMatrix inv_sqrt;
  try {
    inv_sqrt = hermitian_sqrt_inv(w.S_Jperp, policy);
  } catch (const NumericalError&) {
    throw NumericalError("insufficient or degenerate training data");
  }
  w.y_tilde = inv_sqrt * w.y;
  w.H_tilde = inv_sqrt * geometry.H_proj;
  w.P_signal = projector(w.H_tilde, policy);

  w.stats.signal_energy = std::real(w.y_tilde.dot(w.P_signal * w.y_tilde));
  w.stats.total_energy = w.y_tilde.squaredNorm();
  if (w.stats.signal_energy < 0.0) {
    w.stats.signal_energy = 0.0;
  }
  if (w.stats.signal_energy > w.stats.total_energy) {
    w.stats.signal_energy = w.stats.total_energy;
  }
  return w;
}

IcbdWorkspace build_workspace(const TrialData& trial, const ComplexMatrix& H,
                              const ComplexMatrix& J, const NumericPolicy& policy) {
  return build_workspace(trial, make_icbd_geometry(H, J, policy), policy);
}

double icbd_glrt_he(const IcbdWorkspace& w) { return w.stats.glrt_he(); }
double icbd_rao_he(const IcbdWorkspace& w) { return w.stats.rao_he(); }
double icbd_wald_he(const IcbdWorkspace& w) { return w.stats.wald_he(); }
double icbd_phe(const IcbdWorkspace& w) { return w.stats.phe(); }
double loss_factor(const IcbdWorkspace& w) { return w.stats.loss_factor(); }

IcbdStatistics evaluate_icbd(const ComplexVector& x, const ComplexMatrix& X_L,
                             const IcbdGeometry& geometry, const NumericPolicy& policy) {
  if (x.size() != geometry.J_perp.rows() || X_L.rows() != geometry.J_perp.rows()) {
    throw ValidationError("evaluate_icbd: dimensions do not match geometry");
  }
  const ComplexVector y = geometry.J_perp.adjoint() * x;
  const ComplexMatrix Y = geometry.J_perp.adjoint() * X_L;

  const auto m = y.size();
  ComplexMatrix S = ComplexMatrix::Zero(m, m);
  S.selfadjointView<Eigen::Lower>().rankUpdate(Y);

  Eigen::LLT<ComplexMatrix> llt(S);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("insufficient or degenerate training data");
  }

  // Whitening by the Cholesky factor differs from the Hermitian square root
  // by a left unitary, which leaves both quadratic forms unchanged.
  ComplexVector y_w = llt.matrixL().solve(y);
  ComplexMatrix H_w = llt.matrixL().solve(geometry.H_proj);

  Eigen::HouseholderQR<ComplexMatrix> qr(H_w);
  const ComplexMatrix basis =
      qr.householderQ() * ComplexMatrix::Identity(m, H_w.cols());

  IcbdStatistics stats;
  stats.total_energy = y_w.squaredNorm();
  stats.signal_energy = (basis.adjoint() * y_w).squaredNorm();
  if (stats.signal_energy > stats.total_energy) {
    stats.signal_energy = stats.total_energy;
  }
  (void)policy;
  return stats;
}

IcbdStatistics evaluate_icbd(const TrialData& trial, const IcbdGeometry& geometry,
                             const NumericPolicy& policy) {
  return evaluate_icbd(trial.x, trial.X_L, geometry, policy);
}

double ConvStatistics::phe() const {
  if (std::sqrt(interference_free_energy) < default_policy().degenerate_norm) {
    throw NumericalError("degenerate test vector");
  }
  const double ratio = signal_energy / interference_free_energy;
  return ratio < 1.0 ? ratio : 1.0;
}

double ConvStatistics::value(DetectorKind kind) const {
  switch (kind) {
    case DetectorKind::ConvGlrtHe: return glrt_he();
    case DetectorKind::ConvRaoHe: return rao_he();
    case DetectorKind::ConvWaldHe: return wald_he();
    case DetectorKind::ConvPhe: return phe();
    default:
      throw ValidationError("ConvStatistics: not a conventional detector kind");
  }
}

ConvStatistics evaluate_conventional(const ComplexVector& x, const ComplexMatrix& X_L,
                                     const ComplexMatrix& H, const ComplexMatrix& J,
                                     const NumericPolicy& policy) {
  const auto N = x.size();
  if (X_L.rows() != N || H.rows() != N || J.rows() != N) {
    throw ValidationError("conventional detector: inconsistent dimensions");
  }
  if (X_L.cols() < N) {
    throw ValidationError("conventional detector requires invertible SCM");
  }

  const ComplexMatrix S = sample_covariance(X_L);
  ComplexMatrix white;
  try {
    white = hermitian_sqrt_inv(S, policy);
  } catch (const NumericalError&) {
    throw NumericalError("conventional detector: sample covariance not invertible");
  }

  const ComplexVector x_t = white * x;
  const ComplexMatrix J_t = white * J;
  const ComplexMatrix H_t = white * H;
  ComplexMatrix B_t(N, H.cols() + J.cols());
  B_t << H_t, J_t;

  const ComplexMatrix P_J = projector(J_t, policy);
  const ComplexVector x_rej = x_t - P_J * x_t;
  const ComplexMatrix A = H_t - P_J * H_t;  // P_perp(J~) H~
  const ComplexMatrix P_A = projector(A, policy);
  const ComplexMatrix P_B = projector(B_t, policy);

  ConvStatistics stats;
  stats.signal_energy = std::real(x_t.dot(P_A * x_t));
  stats.interference_free_energy = x_rej.squaredNorm();
  stats.joint_residual_energy = (x_t - P_B * x_t).squaredNorm();
  if (stats.signal_energy < 0.0) {
    stats.signal_energy = 0.0;
  }
  return stats;
}

double conv_glrt_he(const ComplexVector& x, const ComplexMatrix& X_L,
                    const ComplexMatrix& H, const ComplexMatrix& J) {
  return evaluate_conventional(x, X_L, H, J).glrt_he();
}

double conv_rao_he(const ComplexVector& x, const ComplexMatrix& X_L,
                   const ComplexMatrix& H, const ComplexMatrix& J) {
  return evaluate_conventional(x, X_L, H, J).rao_he();
}

double conv_wald_he(const ComplexVector& x, const ComplexMatrix& X_L,
                    const ComplexMatrix& H, const ComplexMatrix& J) {
  return evaluate_conventional(x, X_L, H, J).wald_he();
}

double conv_phe(const ComplexVector& x, const ComplexMatrix& X_L,
                const ComplexMatrix& H, const ComplexMatrix& J) {
  return evaluate_conventional(x, X_L, H, J).phe();
}

}  // namespace icbd
