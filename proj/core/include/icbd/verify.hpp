#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icbd/types.hpp"

namespace icbd {

/// Outcome of a randomized-instance identity check. A failing report names
/// the stream index of the worst instance so it can be replayed.
struct IdentityReport {
  std::string identity_id;
  std::size_t instances = 0;
  double max_relative_residual = 0.0;
  double tolerance = 1e-8;
  std::uint64_t worst_instance = 0;
  bool pass = false;
};

/// Equality of the inverse-covariance interference rejector and the
/// complement-basis form, including the partitioned-inverse block identity
/// and the equality of the two effective-SNR expressions.
IdentityReport check_projection_inverse(int N, int q, std::uint64_t seed,
                                        std::size_t instances,
                                        double tolerance = 1e-8);

/// Equivalence of the reduced-dimension and full-space detectors for L >= N:
/// the whitened projector identities, the scalar quadratic-form equalities,
/// and the four statistic equalities.
IdentityReport check_whitening_equivalence(int N, int L, int p, int q,
                                           std::uint64_t seed, std::size_t instances,
                                           double tolerance = 1e-8);

/// The loss-factor relations tying the Rao, Wald, and PHE statistics to the
/// principal one, checked on sample-starved trials (L >= N - q only).
IdentityReport check_statistic_relations(std::uint64_t seed, std::size_t instances,
                                         double tolerance = 1e-10, int N = 16,
                                         int L = 13, int p = 2, int q = 4);

/// All identity checks at their default dimensions.
std::vector<IdentityReport> run_all_identity_checks(std::uint64_t seed,
                                                    std::size_t instances,
                                                    double tolerance = 1e-8);

}  // namespace icbd
