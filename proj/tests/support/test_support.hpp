#pragma once

#include "icbd/rng.hpp"
#include "icbd/types.hpp"

namespace icbd::test {

inline ComplexMatrix random_matrix(StreamRng& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = rng.complex_normal();
    }
  }
  return m;
}

inline ComplexVector random_vector(StreamRng& rng, int n) {
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = rng.complex_normal();
  }
  return v;
}

// Comfortably conditioned random HPD matrix.
inline ComplexMatrix random_hpd(StreamRng& rng, int n) {
  const ComplexMatrix a = random_matrix(rng, n, n);
  return a * a.adjoint() / static_cast<double>(n) +
         0.5 * ComplexMatrix::Identity(n, n);
}

inline ComplexMatrix random_unitary(StreamRng& rng, int n) {
  const ComplexMatrix a = random_matrix(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace icbd::test
