#include "icbd/types.hpp"

namespace icbd {

const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

namespace {

bool all_finite(const ComplexMatrix& m) {
  return m.array().isFinite().all();
}

}  // namespace

void require_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ValidationError(std::string(what) + ": empty matrix");
  }
  if (!all_finite(m)) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

void require_finite(const ComplexVector& v, const char* what) {
  if (v.size() < 1) {
    throw ValidationError(std::string(what) + ": empty vector");
  }
  if (!v.array().isFinite().all()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

}  // namespace icbd
