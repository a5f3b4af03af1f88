#include <doctest.h>

#include <cmath>

#include "icbd/linalg.hpp"
#include "icbd/scenario.hpp"
#include "support/test_support.hpp"

using namespace icbd;

TEST_CASE("covariance model evaluates the Gaussian-shaped profile") {
  const ComplexMatrix R2 = build_covariance(2, 0.5);
  CHECK(R2(0, 0).real() == doctest::Approx(1.0));
  CHECK(R2(0, 1).real() == doctest::Approx(0.5));
  CHECK(R2(1, 0).real() == doctest::Approx(0.5));

  const ComplexMatrix R3 = build_covariance(3, 0.95);
  CHECK(R3(0, 1).real() == doctest::Approx(0.95));
  CHECK(R3(1, 2).real() == doctest::Approx(0.95));
  CHECK(R3(0, 2).real() == doctest::Approx(0.81450625));
  CHECK((R3 - R3.transpose()).norm() == 0.0);
}

TEST_CASE("covariance model is positive definite and rejects bad epsilon") {
  for (int N : {4, 24, 48}) {
    const ComplexMatrix R = build_covariance(N, 0.95);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(R);
    CHECK(eig.eigenvalues()(0) > 0.0);
  }
  CHECK_THROWS_AS(build_covariance(4, 0.0), ValidationError);
  CHECK_THROWS_AS(build_covariance(4, 1.0), ValidationError);
  CHECK_THROWS_AS(build_covariance(4, -0.5), ValidationError);
}

TEST_CASE("covariance-shaped sampling reproduces the target covariance") {
  const int n_samples = 100000;

  SUBCASE("identity covariance") {
    const int N = 8;
    const ComplexMatrix R = ComplexMatrix::Identity(N, N);
    GaussianSampler sampler(R);
    StreamRng rng(101, "test/gaussian", 0);
    ComplexMatrix acc = ComplexMatrix::Zero(N, N);
    for (int i = 0; i < n_samples; ++i) {
      const ComplexVector z = sampler.draw(rng);
      acc.selfadjointView<Eigen::Lower>().rankUpdate(z);
    }
    const ComplexMatrix emp =
        ComplexMatrix(acc.selfadjointView<Eigen::Lower>()) / n_samples;
    CHECK((emp - R).norm() / R.norm() < 0.05);
  }

  SUBCASE("correlated covariance at the reference dimensions") {
    const ComplexMatrix R = build_covariance(24, 0.95);
    GaussianSampler sampler(R);
    StreamRng rng(102, "test/gaussian", 0);
    ComplexMatrix acc = ComplexMatrix::Zero(24, 24);
    for (int i = 0; i < n_samples; ++i) {
      const ComplexVector z = sampler.draw(rng);
      acc.selfadjointView<Eigen::Lower>().rankUpdate(z);
    }
    const ComplexMatrix emp =
        ComplexMatrix(acc.selfadjointView<Eigen::Lower>()) / n_samples;
    CHECK((emp - R).norm() / R.norm() < 0.05);
  }
}

TEST_CASE("degenerate covariance is rejected at construction") {
  ComplexMatrix empty(0, 0);
  StreamRng rng(103, "test/gaussian", 0);
  CHECK_THROWS_AS(sample_complex_gaussian(empty, rng), ValidationError);
}

TEST_CASE("single draws match the factored-covariance construction") {
  const ComplexMatrix R = build_covariance(6, 0.8);
  StreamRng rng_a(104, "test/gaussian", 7);
  StreamRng rng_b(104, "test/gaussian", 7);
  const ComplexVector via_op = sample_complex_gaussian(R, rng_a);
  const ComplexVector via_sampler = GaussianSampler(R).draw(rng_b);
  CHECK((via_op - via_sampler).norm() == 0.0);
}

namespace {

Scenario reference_scenario(bool training_interference = false) {
  return Scenario::make_random(24, 23, 2, 6, 0.95, 42, Environment::HE, 1.0,
                               training_interference);
}

}  // namespace

TEST_CASE("trial synthesis produces the reference shapes") {
  const Scenario s = reference_scenario();
  StreamRng rng(7, "test/trial", 0);
  const TrialData trial = synthesize_trial(s, 100.0, Hypothesis::H1, rng);
  CHECK(trial.x.size() == 24);
  CHECK(trial.X_L.rows() == 24);
  CHECK(trial.X_L.cols() == 23);
}

TEST_CASE("zero eSNR under H1 reproduces the H0 draw bitwise") {
  const Scenario s = reference_scenario();
  StreamRng rng_a(8, "test/trial", 3);
  StreamRng rng_b(8, "test/trial", 3);
  const TrialData h1 = synthesize_trial(s, 0.0, Hypothesis::H1, rng_a);
  const TrialData h0 = synthesize_trial(s, 0.0, Hypothesis::H0, rng_b);
  CHECK((h1.x - h0.x).norm() == 0.0);
  CHECK((h1.X_L - h0.X_L).norm() == 0.0);
}

TEST_CASE("training interference adds only inside the interference subspace") {
  const Scenario clean = reference_scenario(false);
  const Scenario contaminated = reference_scenario(true);
  StreamRng rng_a(9, "test/trial", 11);
  StreamRng rng_b(9, "test/trial", 11);
  const TrialData t_clean = synthesize_trial(clean, 0.0, Hypothesis::H0, rng_a);
  const TrialData t_cont = synthesize_trial(contaminated, 0.0, Hypothesis::H0, rng_b);

  // Identical noise realization; the difference is pure interference.
  const ComplexMatrix diff = t_cont.X_L - t_clean.X_L;
  CHECK(diff.norm() > 1.0);
  const ComplexMatrix J_perp = clean.interference_complement();
  CHECK((J_perp.adjoint() * diff).norm() < 1e-10 * diff.norm());
}

TEST_CASE("negative eSNR is rejected") {
  const Scenario s = reference_scenario();
  StreamRng rng(10, "test/trial", 0);
  CHECK_THROWS_AS(synthesize_trial(s, -1.0, Hypothesis::H1, rng), ValidationError);
}

TEST_CASE("eSNR vanishes for a zero coordinate vector") {
  const Scenario s = reference_scenario();
  const ComplexVector zero = ComplexVector::Zero(2);
  CHECK(esnr_icbd(zero, s.H(), s.interference_complement(), s.R()) == 0.0);
  CHECK(esnr_conventional(zero, s.H(), s.J(), s.R()) == 0.0);
}

TEST_CASE("eSNR reduces to the coordinate norm in the orthonormal case") {
  // H = [e1, e2], J = [e3, e4] in C^6 with R = I: the projected covariance is
  // the identity on <J>^perp and H lies inside it.
  ComplexMatrix H = ComplexMatrix::Zero(6, 2);
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;
  ComplexMatrix J = ComplexMatrix::Zero(6, 2);
  J(2, 0) = 1.0;
  J(3, 1) = 1.0;
  const ComplexMatrix R = ComplexMatrix::Identity(6, 6);
  StreamRng rng(11, "test/esnr", 0);
  const ComplexVector theta = test::random_vector(rng, 2);

  const ComplexMatrix J_perp = orth_complement(J);
  CHECK(esnr_icbd(theta, H, J_perp, R) ==
        doctest::Approx(theta.squaredNorm()).epsilon(1e-12));
  CHECK(esnr_conventional(theta, H, J, R) ==
        doctest::Approx(theta.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("the two eSNR expressions agree on random instances") {
  for (std::uint64_t i = 0; i < 25; ++i) {
    StreamRng rng(12, "test/esnr", i);
    const ComplexMatrix R = test::random_hpd(rng, 12);
    const ComplexMatrix H = test::random_matrix(rng, 12, 2);
    const ComplexMatrix J = test::random_matrix(rng, 12, 3);
    const ComplexVector theta = test::random_vector(rng, 2);
    const double icbd_value = esnr_icbd(theta, H, orth_complement(J), R);
    const double conv_value = esnr_conventional(theta, H, J, R);
    CHECK(std::abs(icbd_value - conv_value) < 1e-10 * conv_value);
  }
}

TEST_CASE("eSNR is a quadratic form and basis invariant") {
  const Scenario s = reference_scenario();
  const ComplexMatrix& J_perp = s.interference_complement();
  const double base = esnr_icbd(s.theta0(), s.H(), J_perp, s.R());

  const ComplexVector scaled = 3.0 * s.theta0();
  CHECK(esnr_icbd(scaled, s.H(), J_perp, s.R()) ==
        doctest::Approx(9.0 * base).epsilon(1e-12));

  StreamRng rng(13, "test/esnr", 99);
  const ComplexMatrix Q = test::random_unitary(rng, 18);
  const double rotated = esnr_icbd(s.theta0(), s.H(), ComplexMatrix(J_perp * Q), s.R());
  CHECK(std::abs(rotated - base) < 1e-10 * base);
}

TEST_CASE("amplitude control hits the requested eSNR") {
  const Scenario s = reference_scenario();
  CHECK(scale_to_esnr(s, 0.0) == 0.0);
  CHECK(scale_to_esnr(s, s.base_esnr()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scale_to_esnr(s, 4.0 * s.base_esnr()) == doctest::Approx(2.0).epsilon(1e-12));

  const double target = 250.0;
  const double a = scale_to_esnr(s, target);
  const ComplexVector theta = a * s.theta0();
  CHECK(esnr_icbd(theta, s.H(), s.interference_complement(), s.R()) ==
        doctest::Approx(target).epsilon(1e-10));
}

TEST_CASE("scenario validation enforces the documented invariants") {
  CHECK_THROWS_AS(Scenario::make_random(8, 3, 2, 2, 0.9, 1), ValidationError);  // L < N-q
  CHECK_THROWS_AS(Scenario::make_random(4, 8, 3, 2, 0.9, 1), ValidationError);  // p+q > N
  CHECK_THROWS_AS(
      Scenario::make_random(8, 10, 2, 2, 0.9, 1, Environment::HE, 2.0),
      ValidationError);  // HE fixes sigma2
  CHECK_NOTHROW(Scenario::make_random(8, 10, 2, 2, 0.9, 1, Environment::PHE, 2.0));
}

TEST_CASE("subspace draws are frozen per seed") {
  const Scenario a = reference_scenario();
  const Scenario b = reference_scenario();
  CHECK((a.H() - b.H()).norm() == 0.0);
  CHECK((a.J() - b.J()).norm() == 0.0);
  CHECK((a.theta0() - b.theta0()).norm() == 0.0);
  CHECK((a.phi() - b.phi()).norm() == 0.0);

  const Scenario c = Scenario::make_random(24, 23, 2, 6, 0.95, 43);
  CHECK((a.H() - c.H()).norm() > 1e-6);
}
