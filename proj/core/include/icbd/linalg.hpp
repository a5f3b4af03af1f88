#pragma once

#include "icbd/types.hpp"

namespace icbd {

/// Result of the polar decomposition A = unitary_factor * hermitian_factor.
struct PolarDecomposition {
  ComplexMatrix unitary_factor;    // N x q, orthonormal columns
  ComplexMatrix hermitian_factor;  // q x q, Hermitian positive definite
};

/// Polar decomposition of a full-column-rank N x q matrix:
/// J = J_u * (J^H J)^{1/2} with J_u = J (J^H J)^{-1/2}.
PolarDecomposition polar_decompose(const ComplexMatrix& J,
                                   const NumericPolicy& policy = default_policy());

/// Orthonormal basis of the orthogonal complement of the column space of J,
/// as the trailing N-q columns of a full unitary QR factor. Requires q < N.
ComplexMatrix orth_complement(const ComplexMatrix& J,
                              const NumericPolicy& policy = default_policy());

/// Hermitian square root M^{1/2} of a Hermitian positive definite matrix,
/// via eigendecomposition of the symmetrized input.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& M,
                             const NumericPolicy& policy = default_policy());

/// Hermitian inverse square root M^{-1/2}: the unique Hermitian T with
/// T M T = I.
ComplexMatrix hermitian_sqrt_inv(const ComplexMatrix& M,
                                 const NumericPolicy& policy = default_policy());

/// Orthogonal projector onto the column space of a full-column-rank matrix:
/// P = A (A^H A)^{-1} A^H, computed from an orthonormal basis.
ComplexMatrix projector(const ComplexMatrix& A,
                        const NumericPolicy& policy = default_policy());

/// Unnormalized sample covariance S = X_L X_L^H of column snapshots.
ComplexMatrix sample_covariance(const ComplexMatrix& X_L);

}  // namespace icbd
