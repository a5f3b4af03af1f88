#include <doctest.h>

#include <cmath>

#include "icbd/detectors.hpp"
#include "icbd/linalg.hpp"
#include "support/test_support.hpp"

using namespace icbd;

namespace {

// Contrived fixture in C^5 with q = 2, p = 1: training snapshots equal to the
// complement basis give S_Jperp = I, so whitening is the identity and the
// reduced-space picture can be read off directly.
struct AlignedFixture {
  ComplexMatrix J;       // 5 x 2
  ComplexMatrix J_perp;  // 5 x 3
  ComplexMatrix H;       // 5 x 1, projects to e1 in the reduced space
  TrialData trial;       // X_L = J_perp columns

  explicit AlignedFixture(const ComplexVector& y_target) {
    J = ComplexMatrix::Zero(5, 2);
    J(3, 0) = 1.0;
    J(4, 1) = 1.0;
    J_perp = orth_complement(J);
    H = J_perp.col(0);
    trial.x = J_perp * y_target;
    trial.X_L = J_perp;
    trial.hypothesis = Hypothesis::H0;
  }
};

ComplexVector unit3(int idx, double scale = 1.0) {
  ComplexVector v = ComplexVector::Zero(3);
  v(idx) = scale;
  return v;
}

}  // namespace

TEST_CASE("workspace whitening is the identity for complement-basis training") {
  AlignedFixture fx(unit3(1));
  const IcbdWorkspace w = build_workspace(fx.trial, fx.H, fx.J);
  CHECK((w.S_Jperp - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
  CHECK((w.y_tilde - w.y).norm() < 1e-12);
}

TEST_CASE("interference-only test data projects to zero") {
  AlignedFixture fx(unit3(0));
  StreamRng rng(21, "test/detectors", 0);
  fx.trial.x = fx.J * test::random_vector(rng, 2);
  const IcbdWorkspace w = build_workspace(fx.trial, fx.H, fx.J);
  CHECK(w.y.norm() < 1e-14);
  CHECK(icbd_glrt_he(w) < 1e-20);
  CHECK(icbd_rao_he(w) < 1e-20);
  CHECK(icbd_wald_he(w) < 1e-20);
  CHECK(loss_factor(w) == doctest::Approx(1.0));
  CHECK_THROWS_AS(icbd_phe(w), NumericalError);
}

TEST_CASE("whitened data orthogonal to the signal subspace scores zero") {
  AlignedFixture fx(unit3(1));  // y along e2, signal subspace is e1
  const IcbdWorkspace w = build_workspace(fx.trial, fx.H, fx.J);
  CHECK(icbd_glrt_he(w) < 1e-20);
  CHECK(icbd_rao_he(w) < 1e-20);
  CHECK(icbd_wald_he(w) < 1e-20);
  CHECK(icbd_phe(w) < 1e-20);
}

TEST_CASE("whitened data inside the signal subspace hits the closed forms") {
  AlignedFixture fx(unit3(0, 3.0));  // y = 3 e1, u = 9, residual = 0
  const IcbdWorkspace w = build_workspace(fx.trial, fx.H, fx.J);
  const double u = 9.0;
  CHECK(icbd_glrt_he(w) == doctest::Approx(u).epsilon(1e-10));
  CHECK(icbd_wald_he(w) == doctest::Approx(u).epsilon(1e-10));
  CHECK(icbd_phe(w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loss_factor(w) == doctest::Approx(1.0).epsilon(1e-12));
  // At loss factor one the Rao statistic collapses onto GLRT/(1+GLRT).
  CHECK(icbd_rao_he(w) == doctest::Approx(u / (1.0 + u)).epsilon(1e-10));
}

TEST_CASE("unit residual energy halves the loss factor") {
  ComplexVector y = ComplexVector::Zero(3);
  y(0) = 2.0;  // signal part
  y(1) = 1.0;  // residual part
  AlignedFixture fx(y);
  const IcbdWorkspace w = build_workspace(fx.trial, fx.H, fx.J);
  CHECK(loss_factor(w) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(icbd_glrt_he(w) == doctest::Approx(2.0).epsilon(1e-10));   // 4 / (1+1)
  CHECK(icbd_wald_he(w) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(icbd_phe(w) == doctest::Approx(0.8).epsilon(1e-10));       // 4 / 5
}

TEST_CASE("degenerate training data is rejected") {
  AlignedFixture fx(unit3(0));
  fx.trial.X_L = ComplexMatrix::Zero(5, 3);
  CHECK_THROWS_AS(build_workspace(fx.trial, fx.H, fx.J), NumericalError);
}

namespace {

TrialData random_trial(StreamRng& rng, int N, int L) {
  TrialData trial;
  trial.x = test::random_vector(rng, N);
  trial.X_L = test::random_matrix(rng, N, L);
  return trial;
}

}  // namespace

TEST_CASE("loss-factor relations hold on random sample-starved trials") {
  const int N = 16, L = 13, p = 2, q = 4;  // L < N but L >= N - q
  for (std::uint64_t i = 0; i < 200; ++i) {
    StreamRng rng(22, "test/relations", i);
    const TrialData trial = random_trial(rng, N, L);
    const ComplexMatrix H = test::random_matrix(rng, N, p);
    const ComplexMatrix J = test::random_matrix(rng, N, q);
    const IcbdWorkspace w = build_workspace(trial, H, J);

    const double glrt = icbd_glrt_he(w);
    const double beta = loss_factor(w);
    CHECK(beta > 0.0);
    CHECK(beta <= 1.0);
    CHECK(icbd_rao_he(w) ==
          doctest::Approx(glrt * beta / (1.0 + glrt)).epsilon(1e-10));
    CHECK(icbd_wald_he(w) == doctest::Approx(glrt / beta).epsilon(1e-10));
    CHECK(icbd_phe(w) ==
          doctest::Approx(glrt / (1.0 - beta + glrt)).epsilon(1e-10));
    CHECK(icbd_rao_he(w) < beta);
  }
}

TEST_CASE("fast evaluation matches the workspace route") {
  const int N = 16, L = 13, p = 2, q = 4;
  for (std::uint64_t i = 0; i < 100; ++i) {
    StreamRng rng(23, "test/fastpath", i);
    const TrialData trial = random_trial(rng, N, L);
    const ComplexMatrix H = test::random_matrix(rng, N, p);
    const ComplexMatrix J = test::random_matrix(rng, N, q);

    const IcbdGeometry geometry = make_icbd_geometry(H, J);
    const IcbdWorkspace w = build_workspace(trial, geometry);
    const IcbdStatistics fast = evaluate_icbd(trial, geometry);

    CHECK(fast.glrt_he() == doctest::Approx(icbd_glrt_he(w)).epsilon(1e-10));
    CHECK(fast.rao_he() == doctest::Approx(icbd_rao_he(w)).epsilon(1e-10));
    CHECK(fast.wald_he() == doctest::Approx(icbd_wald_he(w)).epsilon(1e-10));
    CHECK(fast.phe() == doctest::Approx(icbd_phe(w)).epsilon(1e-10));
    CHECK(fast.loss_factor() == doctest::Approx(loss_factor(w)).epsilon(1e-10));
  }
}

TEST_CASE("reduced and full-space statistics coincide for L >= N") {
  const int N = 12, L = 16, p = 2, q = 3;
  for (std::uint64_t i = 0; i < 100; ++i) {
    StreamRng rng(24, "test/equivalence", i);
    const TrialData trial = random_trial(rng, N, L);
    const ComplexMatrix H = test::random_matrix(rng, N, p);
    const ComplexMatrix J = test::random_matrix(rng, N, q);

    const IcbdWorkspace w = build_workspace(trial, H, J);
    CHECK(conv_glrt_he(trial.x, trial.X_L, H, J) ==
          doctest::Approx(icbd_glrt_he(w)).epsilon(1e-9));
    CHECK(conv_rao_he(trial.x, trial.X_L, H, J) ==
          doctest::Approx(icbd_rao_he(w)).epsilon(1e-9));
    CHECK(conv_wald_he(trial.x, trial.X_L, H, J) ==
          doctest::Approx(icbd_wald_he(w)).epsilon(1e-9));
    CHECK(conv_phe(trial.x, trial.X_L, H, J) ==
          doctest::Approx(icbd_phe(w)).epsilon(1e-9));
  }
}

TEST_CASE("conventional detectors require an invertible SCM") {
  const int N = 12;
  StreamRng rng(25, "test/equivalence", 0);
  const TrialData trial = random_trial(rng, N, N - 1);
  const ComplexMatrix H = test::random_matrix(rng, N, 2);
  const ComplexMatrix J = test::random_matrix(rng, N, 3);
  CHECK_THROWS_AS(conv_glrt_he(trial.x, trial.X_L, H, J), ValidationError);
}

TEST_CASE("interference-only data zeroes the conventional statistics too") {
  const int N = 10, L = 14, p = 2, q = 3;
  StreamRng rng(26, "test/equivalence", 1);
  TrialData trial = random_trial(rng, N, L);
  const ComplexMatrix H = test::random_matrix(rng, N, p);
  const ComplexMatrix J = test::random_matrix(rng, N, q);
  trial.x = J * test::random_vector(rng, q);

  CHECK(conv_glrt_he(trial.x, trial.X_L, H, J) < 1e-18);
  CHECK(conv_rao_he(trial.x, trial.X_L, H, J) < 1e-18);
  CHECK(conv_wald_he(trial.x, trial.X_L, H, J) < 1e-18);
  CHECK(conv_phe(trial.x, trial.X_L, H, J) < 1e-18);
}

TEST_CASE("every ICBD statistic is invariant to the complement basis") {
  const int N = 16, L = 13, p = 2, q = 4;
  for (std::uint64_t i = 0; i < 25; ++i) {
    StreamRng rng(27, "test/basis", i);
    const TrialData trial = random_trial(rng, N, L);
    const ComplexMatrix H = test::random_matrix(rng, N, p);
    const ComplexMatrix J = test::random_matrix(rng, N, q);

    const IcbdGeometry canonical = make_icbd_geometry(H, J);
    const ComplexMatrix Q = test::random_unitary(rng, N - q);
    const IcbdGeometry rotated =
        icbd_geometry_with_basis(H, ComplexMatrix(canonical.J_perp * Q));

    const IcbdStatistics a = evaluate_icbd(trial, canonical);
    const IcbdStatistics b = evaluate_icbd(trial, rotated);
    CHECK(a.glrt_he() == doctest::Approx(b.glrt_he()).epsilon(1e-9));
    CHECK(a.rao_he() == doctest::Approx(b.rao_he()).epsilon(1e-9));
    CHECK(a.wald_he() == doctest::Approx(b.wald_he()).epsilon(1e-9));
    CHECK(a.phe() == doctest::Approx(b.phe()).epsilon(1e-9));
  }
}

TEST_CASE("adding interference to the test vector changes nothing") {
  const int N = 16, L = 13, p = 2, q = 4;
  for (std::uint64_t i = 0; i < 50; ++i) {
    StreamRng rng(28, "test/rejection", i);
    TrialData trial = random_trial(rng, N, L);
    const ComplexMatrix H = test::random_matrix(rng, N, p);
    const ComplexMatrix J = test::random_matrix(rng, N, q);
    const IcbdGeometry geometry = make_icbd_geometry(H, J);

    const IcbdStatistics before = evaluate_icbd(trial, geometry);
    trial.x += J * (10.0 * test::random_vector(rng, q));
    const IcbdStatistics after = evaluate_icbd(trial, geometry);

    CHECK(after.glrt_he() == doctest::Approx(before.glrt_he()).epsilon(1e-10));
    CHECK(after.rao_he() == doctest::Approx(before.rao_he()).epsilon(1e-10));
    CHECK(after.wald_he() == doctest::Approx(before.wald_he()).epsilon(1e-10));
    CHECK(after.phe() == doctest::Approx(before.phe()).epsilon(1e-10));
  }
}

TEST_CASE("PHE is scale invariant, HE is not") {
  const int N = 16, L = 13, p = 2, q = 4;
  StreamRng rng(29, "test/scale", 0);
  TrialData trial = random_trial(rng, N, L);
  const ComplexMatrix H = test::random_matrix(rng, N, p);
  const ComplexMatrix J = test::random_matrix(rng, N, q);
  const IcbdGeometry geometry = make_icbd_geometry(H, J);

  const IcbdStatistics base = evaluate_icbd(trial, geometry);

  TrialData doubled = trial;
  doubled.x = Complex(0.0, 2.0) * trial.x;  // |c|^2 = 4, exact in binary
  const IcbdStatistics scaled = evaluate_icbd(doubled, geometry);
  CHECK(scaled.phe() == base.phe());
  CHECK(scaled.glrt_he() != base.glrt_he());
  CHECK(scaled.wald_he() == doctest::Approx(4.0 * base.wald_he()).epsilon(1e-12));

  TrialData generic = trial;
  generic.x = Complex(0.7, -1.3) * trial.x;
  CHECK(evaluate_icbd(generic, geometry).phe() ==
        doctest::Approx(base.phe()).epsilon(1e-12));
}

TEST_CASE("detector names round-trip") {
  for (DetectorKind kind : kAllDetectors) {
    const auto parsed = detector_from_string(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK(!detector_from_string("NOT_A_DETECTOR").has_value());
  CHECK(is_icbd(DetectorKind::IcbdPhe));
  CHECK(!is_icbd(DetectorKind::ConvPhe));
  CHECK(icbd_counterpart(DetectorKind::ConvWaldHe) == DetectorKind::IcbdWaldHe);
}
