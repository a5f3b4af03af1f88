#include "icbd/linalg.hpp"

#include <sstream>

namespace icbd {

namespace {

// Eigendecomposition of the symmetrized input with a positive-definiteness
// check. Below the eigenvalue-ratio floor we refuse to factor instead of
// regularizing; silent regularization would corrupt the distribution theory
// this library is meant to validate.
Eigen::SelfAdjointEigenSolver<ComplexMatrix> hpd_eigensolver(
    const ComplexMatrix& M, const NumericPolicy& policy, const char* what) {
  require_finite(M, what);
  if (M.rows() != M.cols()) {
    throw ValidationError(std::string(what) + ": matrix not square");
  }
  const double asym = (M - M.adjoint()).norm();
  if (asym > policy.hermitian_tol * std::max(M.norm(), 1e-300)) {
    throw ValidationError(std::string(what) + ": matrix not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": eigendecomposition failed");
  }
  const double lambda_min = eig.eigenvalues()(0);
  const double lambda_max = eig.eigenvalues()(M.rows() - 1);
  if (!(lambda_max > 0.0) || lambda_min <= policy.pd_eig_ratio * lambda_max) {
    std::ostringstream msg;
    msg << what << ": matrix not positive definite (smallest eigenvalue "
        << lambda_min << ", largest " << lambda_max << ")";
    throw NumericalError(msg.str());
  }
  return eig;
}

}  // namespace

PolarDecomposition polar_decompose(const ComplexMatrix& J, const NumericPolicy& policy) {
  require_finite(J, "polar_decompose");
  const auto q = J.cols();
  const ComplexMatrix gram = J.adjoint() * J;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("polar_decompose: eigendecomposition failed");
  }
  const double lambda_max = eig.eigenvalues()(q - 1);
  if (!(lambda_max > 0.0) ||
      eig.eigenvalues()(0) <= policy.rank_ratio * lambda_max) {
    throw NumericalError("interference matrix not full column rank");
  }
  const Eigen::VectorXd sqrt_vals = eig.eigenvalues().cwiseSqrt();
  PolarDecomposition out;
  out.hermitian_factor =
      eig.eigenvectors() * sqrt_vals.asDiagonal() * eig.eigenvectors().adjoint();
  out.unitary_factor = J * (eig.eigenvectors() *
                            sqrt_vals.cwiseInverse().asDiagonal() *
                            eig.eigenvectors().adjoint());
  return out;
}

ComplexMatrix orth_complement(const ComplexMatrix& J, const NumericPolicy& policy) {
  require_finite(J, "orth_complement");
  const auto N = J.rows();
  const auto q = J.cols();
  if (q >= N) {
    throw ValidationError("interference subspace fills the space");
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(J);
  const ComplexMatrix& R = qr.matrixR();
  const double r_max = std::abs(R(0, 0));
  for (Eigen::Index i = 0; i < q; ++i) {
    if (std::abs(R(i, i)) <= policy.rank_ratio * r_max) {
      throw NumericalError("interference matrix not full column rank");
    }
  }
  // Column pivoting permutes columns only, so the leading q columns of Q
  // still span <J>; the trailing N-q columns are the complement.
  const ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(N, N);
  return Q.rightCols(N - q);
}

namespace {

ComplexMatrix hermitian_power(const ComplexMatrix& M, double exponent,
                              const NumericPolicy& policy, const char* what) {
  const auto eig = hpd_eigensolver(M, policy, what);
  const Eigen::VectorXd powered =
      eig.eigenvalues().array().pow(exponent).matrix();
  ComplexMatrix out =
      eig.eigenvectors() * powered.asDiagonal() * eig.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

ComplexMatrix hermitian_sqrt(const ComplexMatrix& M, const NumericPolicy& policy) {
  return hermitian_power(M, 0.5, policy, "hermitian_sqrt");
}

ComplexMatrix hermitian_sqrt_inv(const ComplexMatrix& M, const NumericPolicy& policy) {
  return hermitian_power(M, -0.5, policy, "hermitian_sqrt_inv");
}

ComplexMatrix projector(const ComplexMatrix& A, const NumericPolicy& policy) {
  require_finite(A, "projector");
  const auto n = A.rows();
  const auto k = A.cols();
  if (k > n) {
    throw ValidationError("projector: more columns than rows");
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(A);
  const ComplexMatrix& R = qr.matrixR();
  const double r_max = std::abs(R(0, 0));
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(R(i, i)) <= policy.rank_ratio * r_max) {
      throw NumericalError("projector: matrix not full column rank");
    }
  }
  const ComplexMatrix basis = qr.householderQ() * ComplexMatrix::Identity(n, k);
  ComplexMatrix P = basis * basis.adjoint();
  return 0.5 * (P + P.adjoint());
}

ComplexMatrix sample_covariance(const ComplexMatrix& X_L) {
  require_finite(X_L, "sample_covariance");
  const auto N = X_L.rows();
  ComplexMatrix S = ComplexMatrix::Zero(N, N);
  S.selfadjointView<Eigen::Lower>().rankUpdate(X_L);
  return S.selfadjointView<Eigen::Lower>();
}

}  // namespace icbd
