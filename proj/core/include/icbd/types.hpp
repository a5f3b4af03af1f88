#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace icbd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Contract violation on inputs: bad dimensions, ranges, or configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that cannot proceed numerically: rank loss, indefiniteness,
/// degenerate data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances shared by the dense linear-algebra kernels. Callers that need
/// different slack pass their own record; everything else uses the defaults.
struct NumericPolicy {
  double hermitian_tol = 1e-8;      // ||M - M^H|| <= tol * ||M||
  double pd_eig_ratio = 1e-12;      // lambda_min must exceed ratio * lambda_max
  double rank_ratio = 1e-12;        // values below ratio * max count as rank loss
  double degenerate_norm = 1e-14;   // whitened test vectors below this are degenerate
};

const NumericPolicy& default_policy();

void require_finite(const ComplexMatrix& m, const char* what);
void require_finite(const ComplexVector& v, const char* what);

}  // namespace icbd
