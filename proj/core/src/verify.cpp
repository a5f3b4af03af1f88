#include "icbd/verify.hpp"

#include <algorithm>
#include <cmath>

#include "icbd/detectors.hpp"
#include "icbd/linalg.hpp"
#include "icbd/rng.hpp"
#include "icbd/scenario.hpp"

namespace icbd {

namespace {

ComplexMatrix random_cg_matrix(StreamRng& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = rng.complex_normal();
    }
  }
  return m;
}

ComplexVector random_cg_vector(StreamRng& rng, int n) {
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = rng.complex_normal();
  }
  return v;
}

// Random HPD matrix with condition number capped at 1e6 by eigenvalue
// clipping, so residual tolerances measure identity validity rather than
// conditioning artifacts.
ComplexMatrix well_conditioned_hpd(StreamRng& rng, int n) {
  const ComplexMatrix A = random_cg_matrix(rng, n, n);
  ComplexMatrix M = ComplexMatrix::Zero(n, n);
  M.selfadjointView<Eigen::Lower>().rankUpdate(A);
  M = ComplexMatrix(M.selfadjointView<Eigen::Lower>());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(M);
  Eigen::VectorXd vals = eig.eigenvalues();
  const double floor_val = vals(n - 1) * 1e-6;
  vals = vals.cwiseMax(floor_val);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

double rel_residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  const double scale = std::max(rhs.norm(), 1e-300);
  return (lhs - rhs).norm() / scale;
}

double rel_residual(double lhs, double rhs) {
  const double scale = std::max(std::abs(rhs), 1e-300);
  return std::abs(lhs - rhs) / scale;
}

struct ResidualTracker {
  double max_residual = 0.0;
  std::uint64_t worst = 0;

  void record(double residual, std::uint64_t instance) {
    if (residual > max_residual) {
      max_residual = residual;
      worst = instance;
    }
  }
};

IdentityReport finish(std::string id, std::size_t instances, double tolerance,
                      const ResidualTracker& tracker) {
  IdentityReport report;
  report.identity_id = std::move(id);
  report.instances = instances;
  report.max_relative_residual = tracker.max_residual;
  report.tolerance = tolerance;
  report.worst_instance = tracker.worst;
  report.pass = tracker.max_residual < tolerance;
  return report;
}

}  // namespace

IdentityReport check_projection_inverse(int N, int q, std::uint64_t seed,
                                        std::size_t instances, double tolerance) {
  if (q >= N || q < 1) {
    throw ValidationError("check_projection_inverse: need 1 <= q < N");
  }
  const int p = std::min(2, N - q);
  ResidualTracker tracker;
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, "verify/projection_inverse", i);
    const ComplexMatrix R = well_conditioned_hpd(rng, N);
    const ComplexMatrix J = random_cg_matrix(rng, N, q);

    const ComplexMatrix J_u = polar_decompose(J).unitary_factor;
    const ComplexMatrix J_perp = orth_complement(J);

    const ComplexMatrix R_inv = R.inverse();
    const ComplexMatrix gram = J_u.adjoint() * R_inv * J_u;
    const ComplexMatrix lhs =
        R_inv - R_inv * J_u * gram.inverse() * J_u.adjoint() * R_inv;
    const ComplexMatrix core = (J_perp.adjoint() * R * J_perp).inverse();
    const ComplexMatrix rhs = J_perp * core * J_perp.adjoint();
    tracker.record(rel_residual(lhs, rhs), i);

    // Partitioned-inverse block form in the rotated basis U = [J_u, J_perp]:
    // the deflated inverse equals zero except for the trailing block
    // inverse.
    ComplexMatrix U(N, N);
    U << J_u, J_perp;
    const ComplexMatrix R_U = U.adjoint() * R * U;
    const ComplexMatrix R_U_inv = R_U.inverse();
    const ComplexMatrix E = ComplexMatrix::Identity(N, q);
    const ComplexMatrix gram_e = E.adjoint() * R_U_inv * E;
    const ComplexMatrix lhs_block =
        R_U_inv - R_U_inv * E * gram_e.inverse() * E.adjoint() * R_U_inv;
    ComplexMatrix rhs_block = ComplexMatrix::Zero(N, N);
    rhs_block.bottomRightCorner(N - q, N - q) =
        R_U.bottomRightCorner(N - q, N - q).inverse();
    tracker.record(rel_residual(lhs_block, rhs_block), i);

    // eSNR corollary: both effective-SNR expressions agree.
    const ComplexMatrix H = random_cg_matrix(rng, N, p);
    const ComplexVector theta = random_cg_vector(rng, p);
    tracker.record(rel_residual(esnr_icbd(theta, H, J_perp, R),
                                esnr_conventional(theta, H, J, R)),
                   i);
  }
  return finish("projection_inverse", instances, tolerance, tracker);
}

IdentityReport check_whitening_equivalence(int N, int L, int p, int q,
                                           std::uint64_t seed, std::size_t instances,
                                           double tolerance) {
  if (L < N) {
    throw ValidationError("check_whitening_equivalence: requires L >= N");
  }
  if (p < 1 || q < 1 || p + q >= N) {
    throw ValidationError("check_whitening_equivalence: need p, q >= 1 and p + q < N");
  }
  ResidualTracker tracker;
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, "verify/whitening_equivalence", i);
    const ComplexVector x = random_cg_vector(rng, N);
    const ComplexMatrix X_L = random_cg_matrix(rng, N, L);
    const ComplexMatrix H = random_cg_matrix(rng, N, p);
    const ComplexMatrix J = random_cg_matrix(rng, N, q);

    const ComplexMatrix S = sample_covariance(X_L);
    const ComplexMatrix S_sqrt = hermitian_sqrt(S);
    const ComplexMatrix S_isqrt = hermitian_sqrt_inv(S);
    const ComplexMatrix J_perp = orth_complement(J);

    const ComplexMatrix H_t = S_isqrt * H;
    const ComplexMatrix J_t = S_isqrt * J;
    const ComplexMatrix P_J = projector(J_t);
    const ComplexMatrix P_J_perp = ComplexMatrix::Identity(N, N) - P_J;

    // Projector identity: the complement basis pushed through the SCM square
    // root spans exactly the orthogonal complement of the whitened
    // interference subspace.
    const ComplexMatrix J_breve = S_sqrt * J_perp;
    tracker.record(rel_residual(projector(J_breve), P_J_perp), i);

    // Matrix identity: the interference-rejected signal projector sandwiched
    // by the whitening factor equals its reduced-dimension counterpart.
    const ComplexMatrix P_sig_full = projector(P_J_perp * H_t);
    const ComplexMatrix lhs = S_isqrt * P_sig_full * S_isqrt;
    const ComplexMatrix S_perp = J_perp.adjoint() * S * J_perp;
    const ComplexMatrix S_perp_isqrt = hermitian_sqrt_inv(S_perp);
    const ComplexMatrix H_reduced = S_perp_isqrt * (J_perp.adjoint() * H);
    const ComplexMatrix rhs = J_perp * S_perp_isqrt * projector(H_reduced) *
                              S_perp_isqrt * J_perp.adjoint();
    tracker.record(rel_residual(lhs, rhs), i);

    // Scalar quadratic-form equalities.
    const ComplexVector x_t = S_isqrt * x;
    const ComplexVector y_t = S_perp_isqrt * (J_perp.adjoint() * x);
    const double sig_reduced = std::real(y_t.dot(projector(H_reduced) * y_t));
    const double sig_full = std::real(x_t.dot(P_sig_full * x_t));
    const double tot_reduced = y_t.squaredNorm();
    const double tot_full = std::real(x_t.dot(P_J_perp * x_t));
    tracker.record(rel_residual(sig_reduced, sig_full), i);
    tracker.record(rel_residual(tot_reduced, tot_full), i);
    tracker.record(rel_residual(tot_reduced - sig_reduced, tot_full - sig_full), i);

    // Statistic equalities.
    TrialData trial{x, X_L, Hypothesis::H0};
    const IcbdWorkspace w = build_workspace(trial, H, J);
    const ConvStatistics conv = evaluate_conventional(x, X_L, H, J);
    tracker.record(rel_residual(icbd_glrt_he(w), conv.glrt_he()), i);
    tracker.record(rel_residual(icbd_rao_he(w), conv.rao_he()), i);
    tracker.record(rel_residual(icbd_wald_he(w), conv.wald_he()), i);
    tracker.record(rel_residual(icbd_phe(w), conv.phe()), i);
  }
  return finish("whitening_equivalence", instances, tolerance, tracker);
}

IdentityReport check_statistic_relations(std::uint64_t seed, std::size_t instances,
                                         double tolerance, int N, int L, int p, int q) {
  if (L < N - q) {
    throw ValidationError("check_statistic_relations: requires L >= N - q");
  }
  ResidualTracker tracker;
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, "verify/statistic_relations", i);
    TrialData trial;
    trial.x = random_cg_vector(rng, N);
    trial.X_L = random_cg_matrix(rng, N, L);
    const ComplexMatrix H = random_cg_matrix(rng, N, p);
    const ComplexMatrix J = random_cg_matrix(rng, N, q);

    const IcbdWorkspace w = build_workspace(trial, H, J);
    const double glrt = icbd_glrt_he(w);
    const double beta = loss_factor(w);
    tracker.record(rel_residual(icbd_rao_he(w), glrt * beta / (1.0 + glrt)), i);
    tracker.record(rel_residual(icbd_wald_he(w), glrt / beta), i);
    tracker.record(rel_residual(icbd_phe(w), glrt / (1.0 - beta + glrt)), i);
  }
  return finish("statistic_relations", instances, tolerance, tracker);
}

std::vector<IdentityReport> run_all_identity_checks(std::uint64_t seed,
                                                    std::size_t instances,
                                                    double tolerance) {
  std::vector<IdentityReport> reports;
  reports.push_back(check_projection_inverse(24, 6, seed, instances, tolerance));
  reports.push_back(check_whitening_equivalence(12, 16, 2, 3, seed, instances, tolerance));
  reports.push_back(
      check_statistic_relations(seed, instances, std::min(tolerance, 1e-10)));
  return reports;
}

}  // namespace icbd
