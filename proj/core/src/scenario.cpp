#include "icbd/scenario.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "icbd/linalg.hpp"

namespace icbd {

ComplexMatrix build_covariance(int N, double epsilon) {
  if (N < 1) {
    throw ValidationError("build_covariance: N must be positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("build_covariance: epsilon must lie in (0,1)");
  }
  ComplexMatrix R(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double d = static_cast<double>(i - j);
      R(i, j) = std::pow(epsilon, d * d);
    }
  }
  return R;
}

GaussianSampler::GaussianSampler(const ComplexMatrix& R, const NumericPolicy& policy) {
  require_finite(R, "GaussianSampler");
  if (R.rows() != R.cols()) {
    throw ValidationError("GaussianSampler: covariance not square");
  }
  identity_ = R.isIdentity(0.0);
  sqrt_ = identity_ ? R : hermitian_sqrt(R, policy);
}

ComplexVector GaussianSampler::draw(StreamRng& rng) const {
  ComplexVector z(sqrt_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = rng.complex_normal();
  }
  if (identity_) {
    return z;
  }
  return sqrt_ * z;
}

ComplexMatrix GaussianSampler::draw_matrix(StreamRng& rng, int count) const {
  if (count < 1) {
    throw ValidationError("GaussianSampler: column count must be positive");
  }
  ComplexMatrix Z(sqrt_.rows(), count);
  for (Eigen::Index l = 0; l < count; ++l) {
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      Z(i, l) = rng.complex_normal();
    }
  }
  if (identity_) {
    return Z;
  }
  return sqrt_ * Z;
}

ComplexVector sample_complex_gaussian(const ComplexMatrix& R, StreamRng& rng) {
  return GaussianSampler(R).draw(rng);
}

double esnr_icbd(const ComplexVector& theta, const ComplexMatrix& H,
                 const ComplexMatrix& J_perp, const ComplexMatrix& R) {
  if (theta.size() != H.cols() || H.rows() != J_perp.rows() ||
      R.rows() != H.rows() || R.rows() != R.cols()) {
    throw ValidationError("esnr_icbd: inconsistent dimensions");
  }
  const ComplexVector projected = J_perp.adjoint() * (H * theta);
  const ComplexMatrix R_proj = J_perp.adjoint() * R * J_perp;
  Eigen::LLT<ComplexMatrix> llt(0.5 * (R_proj + R_proj.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("esnr_icbd: projected covariance not positive definite");
  }
  return llt.matrixL().solve(projected).squaredNorm();
}

double esnr_conventional(const ComplexVector& theta, const ComplexMatrix& H,
                         const ComplexMatrix& J, const ComplexMatrix& R) {
  if (theta.size() != H.cols() || H.rows() != J.rows() || R.rows() != H.rows() ||
      R.rows() != R.cols()) {
    throw ValidationError("esnr_conventional: inconsistent dimensions");
  }
  const ComplexMatrix white = hermitian_sqrt_inv(R);
  const ComplexMatrix H_bar = white * H;
  const ComplexMatrix J_bar = white * J;
  const ComplexVector v = H_bar * theta;
  const ComplexVector rejected = v - projector(J_bar) * v;
  return rejected.squaredNorm();
}

namespace {

void validate_params(const ScenarioParams& s) {
  if (s.N < 1 || s.L < 1 || s.p < 1 || s.q < 1) {
    throw ValidationError("scenario: dimensions must be positive");
  }
  if (s.p + s.q > s.N) {
    throw ValidationError("scenario: p + q must not exceed N");
  }
  if (s.L < s.N - s.q) {
    throw ValidationError("scenario: training size must satisfy L >= N - q");
  }
  if (s.H.rows() != s.N || s.H.cols() != s.p) {
    throw ValidationError("scenario: H must be N x p");
  }
  if (s.J.rows() != s.N || s.J.cols() != s.q) {
    throw ValidationError("scenario: J must be N x q");
  }
  if (s.R.rows() != s.N || s.R.cols() != s.N) {
    throw ValidationError("scenario: R must be N x N");
  }
  if (s.theta0.size() != s.p) {
    throw ValidationError("scenario: theta0 must have length p");
  }
  if (s.phi.size() != s.q) {
    throw ValidationError("scenario: phi must have length q");
  }
  if (!(s.sigma2 > 0.0)) {
    throw ValidationError("scenario: sigma2 must be positive");
  }
  if (s.environment == Environment::HE && s.sigma2 != 1.0) {
    throw ValidationError("scenario: HE requires sigma2 = 1");
  }
  require_finite(s.H, "scenario H");
  require_finite(s.J, "scenario J");
  require_finite(s.R, "scenario R");
  require_finite(s.theta0, "scenario theta0");
  require_finite(s.phi, "scenario phi");
}

}  // namespace

ComplexVector unit_cg_vector(std::uint64_t seed, std::string_view phase, int n) {
  if (n < 1) {
    throw ValidationError("unit_cg_vector: length must be positive");
  }
  StreamRng rng(seed, phase, 0);
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = rng.complex_normal();
  }
  return v;
}

ComplexMatrix unit_cg_matrix(std::uint64_t seed, std::string_view phase, int rows,
                             int cols) {
  if (rows < 1 || cols < 1) {
    throw ValidationError("unit_cg_matrix: dimensions must be positive");
  }
  StreamRng rng(seed, phase, 0);
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = rng.complex_normal();
    }
  }
  return m;
}

Scenario::Scenario(ScenarioParams params, ComplexMatrix J_perp,
                   GaussianSampler training_noise, GaussianSampler test_noise,
                   double base_esnr, double phi_l_scale)
    : params_(std::move(params)),
      J_perp_(std::move(J_perp)),
      training_noise_(std::move(training_noise)),
      test_noise_(std::move(test_noise)),
      base_esnr_(base_esnr),
      phi_l_scale_(phi_l_scale) {}

Scenario Scenario::make(ScenarioParams params, const NumericPolicy& policy) {
  validate_params(params);
  // Full-rank requirements on H and J surface here, before any sampling.
  ComplexMatrix J_perp = orth_complement(params.J, policy);
  projector(params.H, policy);

  GaussianSampler training_noise(params.R, policy);
  GaussianSampler test_noise(params.sigma2 == 1.0
                                 ? params.R
                                 : ComplexMatrix(params.sigma2 * params.R),
                             policy);
  const double base = esnr_icbd(params.theta0, params.H, J_perp, params.R);

  // Per-column training interference power: training_inr_db above the
  // per-column noise power tr(R).
  const double gram_trace = (params.J.adjoint() * params.J).real().trace();
  const double target_power =
      std::pow(10.0, params.training_inr_db / 10.0) * params.R.real().trace();
  const double phi_l_scale = std::sqrt(target_power / gram_trace);

  return Scenario(std::move(params), std::move(J_perp), std::move(training_noise),
                  std::move(test_noise), base, phi_l_scale);
}

Scenario Scenario::make_random(int N, int L, int p, int q, double epsilon,
                               std::uint64_t subspace_seed, Environment environment,
                               double sigma2, bool training_has_interference,
                               double training_inr_db) {
  ScenarioParams prm;
  prm.N = N;
  prm.L = L;
  prm.p = p;
  prm.q = q;
  prm.H = unit_cg_matrix(subspace_seed, "scenario/H", N, p);
  prm.J = unit_cg_matrix(subspace_seed, "scenario/J", N, q);
  prm.R = build_covariance(N, epsilon);
  prm.sigma2 = sigma2;
  prm.environment = environment;
  prm.training_has_interference = training_has_interference;
  prm.training_inr_db = training_inr_db;
  prm.theta0 = unit_cg_vector(subspace_seed, "scenario/theta0", p);
  prm.phi = unit_cg_vector(subspace_seed, "scenario/phi", q);
  return make(std::move(prm));
}

double scale_to_esnr(const Scenario& s, double target_esnr) {
  if (target_esnr < 0.0) {
    throw ValidationError("scale_to_esnr: target eSNR must be nonnegative");
  }
  if (!(s.base_esnr() > 0.0)) {
    throw NumericalError("scale_to_esnr: theta0 yields zero base eSNR");
  }
  return std::sqrt(target_esnr / s.base_esnr());
}

TrialData synthesize_trial(const Scenario& s, double esnr, Hypothesis hypothesis,
                           StreamRng& rng) {
  if (esnr < 0.0) {
    throw ValidationError("synthesize_trial: eSNR must be nonnegative");
  }
  const ScenarioParams& prm = s.params_;

  TrialData trial;
  trial.hypothesis = hypothesis;

  // Noise first, interference last: the noise realization of a stream is
  // then independent of the interference switches.
  trial.x = s.test_noise_.draw(rng);
  trial.X_L = s.training_noise_.draw_matrix(rng, prm.L);

  trial.x += prm.J * prm.phi;
  if (hypothesis == Hypothesis::H1) {
    const double a = scale_to_esnr(s, esnr);
    if (a > 0.0) {
      trial.x += prm.H * (a * prm.theta0);
    }
  }

  if (prm.training_has_interference) {
    ComplexVector phi_l(prm.q);
    for (int l = 0; l < prm.L; ++l) {
      for (int k = 0; k < prm.q; ++k) {
        phi_l(k) = s.phi_l_scale_ * rng.complex_normal();
      }
      trial.X_L.col(l) += prm.J * phi_l;
    }
  }
  return trial;
}

}  // namespace icbd
