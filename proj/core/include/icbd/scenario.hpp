#pragma once

#include <cstdint>

#include "icbd/rng.hpp"
#include "icbd/types.hpp"

namespace icbd {

enum class Environment { HE, PHE };
enum class Hypothesis { H0, H1 };

/// Everything that defines one detection problem: dimensions, subspaces,
/// covariance model, environment type, and the frozen coordinate vectors.
struct ScenarioParams {
  int N = 0;  // data dimension
  int L = 0;  // training-set size
  int p = 0;  // signal-subspace dimension
  int q = 0;  // interference-subspace dimension
  ComplexMatrix H;  // N x p signal subspace
  ComplexMatrix J;  // N x q interference subspace
  ComplexMatrix R;  // N x N training-noise covariance
  double sigma2 = 1.0;  // test/training power mismatch; HE fixes 1
  Environment environment = Environment::HE;
  bool training_has_interference = false;
  double training_inr_db = 10.0;  // per-column interference power over noise
  ComplexVector theta0;  // p, unit-eSNR signal coordinates
  ComplexVector phi;     // q, test-data interference coordinates
};

/// One test vector plus one training set: the unit of Monte Carlo work.
struct TrialData {
  ComplexVector x;      // N
  ComplexMatrix X_L;    // N x L
  Hypothesis hypothesis = Hypothesis::H0;
};

/// Training-noise covariance R(i,j) = epsilon^{|i-j|^2}.
ComplexMatrix build_covariance(int N, double epsilon);

/// Deterministic unit-variance circular complex Gaussian draws keyed on
/// (seed, phase); used to generate frozen subspaces and coordinates.
ComplexMatrix unit_cg_matrix(std::uint64_t seed, std::string_view phase, int rows,
                             int cols);
ComplexVector unit_cg_vector(std::uint64_t seed, std::string_view phase, int n);

/// One draw n = R^{1/2} z with z i.i.d. standard circular complex normal,
/// so that E[n n^H] = R. Factors R on every call; hot loops should hold a
/// GaussianSampler instead.
ComplexVector sample_complex_gaussian(const ComplexMatrix& R, StreamRng& rng);

/// Reusable covariance-shaped complex Gaussian source (factors R once).
class GaussianSampler {
 public:
  explicit GaussianSampler(const ComplexMatrix& R,
                           const NumericPolicy& policy = default_policy());

  ComplexVector draw(StreamRng& rng) const;
  /// Draws `count` independent columns.
  ComplexMatrix draw_matrix(StreamRng& rng, int count) const;

  int dim() const { return static_cast<int>(sqrt_.rows()); }

 private:
  ComplexMatrix sqrt_;
  bool identity_ = false;
};

/// Effective SNR after interference rejection:
/// theta^H H^H J_perp (J_perp^H R J_perp)^{-1} J_perp^H H theta.
double esnr_icbd(const ComplexVector& theta, const ComplexMatrix& H,
                 const ComplexMatrix& J_perp, const ComplexMatrix& R);

/// Effective SNR of the whitened-space formulation:
/// theta^H Hbar^H P_perp(Jbar) Hbar theta with Hbar = R^{-1/2} H,
/// Jbar = R^{-1/2} J. Equal to esnr_icbd for consistent inputs.
double esnr_conventional(const ComplexVector& theta, const ComplexMatrix& H,
                         const ComplexMatrix& J, const ComplexMatrix& R);

/// Immutable detection problem with the derived quantities precomputed.
class Scenario {
 public:
  /// Validates the parameter block and precomputes the interference
  /// complement, covariance factor, and unit-coordinate eSNR.
  static Scenario make(ScenarioParams params,
                       const NumericPolicy& policy = default_policy());

  /// Builds a problem with fixed-seed random subspaces and coordinates:
  /// H, J, theta0, phi are drawn once from unit-variance circular complex
  /// Gaussians keyed on `subspace_seed` and then frozen.
  static Scenario make_random(int N, int L, int p, int q, double epsilon,
                              std::uint64_t subspace_seed,
                              Environment environment = Environment::HE,
                              double sigma2 = 1.0,
                              bool training_has_interference = false,
                              double training_inr_db = 10.0);

  const ScenarioParams& params() const { return params_; }
  int N() const { return params_.N; }
  int L() const { return params_.L; }
  int p() const { return params_.p; }
  int q() const { return params_.q; }
  const ComplexMatrix& H() const { return params_.H; }
  const ComplexMatrix& J() const { return params_.J; }
  const ComplexMatrix& R() const { return params_.R; }
  const ComplexVector& theta0() const { return params_.theta0; }
  const ComplexVector& phi() const { return params_.phi; }
  double sigma2() const { return params_.sigma2; }
  Environment environment() const { return params_.environment; }
  bool training_has_interference() const { return params_.training_has_interference; }

  /// Canonical orthonormal complement of <J> shared by every consumer.
  const ComplexMatrix& interference_complement() const { return J_perp_; }
  /// eSNR of theta0 itself (the denominator of scale_to_esnr).
  double base_esnr() const { return base_esnr_; }
  const GaussianSampler& training_noise() const { return training_noise_; }

  friend TrialData synthesize_trial(const Scenario& s, double esnr,
                                    Hypothesis hypothesis, StreamRng& rng);

 private:
  Scenario(ScenarioParams params, ComplexMatrix J_perp,
           GaussianSampler training_noise, GaussianSampler test_noise,
           double base_esnr, double phi_l_scale);

  ScenarioParams params_;
  ComplexMatrix J_perp_;
  GaussianSampler training_noise_;  // covariance R
  GaussianSampler test_noise_;      // covariance sigma2 * R
  double base_esnr_ = 0.0;
  double phi_l_scale_ = 0.0;  // std of each training interference coordinate
};

/// Amplitude a >= 0 with esnr_icbd(a * theta0) = target_esnr (linear units).
double scale_to_esnr(const Scenario& s, double target_esnr);

/// Draws one trial. Under H1 the test vector is H (a theta0) + J phi + n;
/// under H0 the signal term is absent. Training columns are J phi_l + n_l
/// when the scenario carries training interference, else pure noise.
/// Noise variates are consumed before interference variates, so toggling
/// training interference preserves the noise realization of a given stream.
TrialData synthesize_trial(const Scenario& s, double esnr, Hypothesis hypothesis,
                           StreamRng& rng);

}  // namespace icbd
