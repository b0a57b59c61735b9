#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "prestrain/certification.hpp"
#include "support.hpp"

using namespace prestrain;

namespace {

// Quadratic form phi^2 + 2|sym F|^2 + 2(tr F)^2 on R x Sym(3), in the
// orthonormal coordinates (phi, S11, S22, S33, sqrt2 S12, sqrt2 S13, sqrt2 S23).
Eigen::Matrix<double, 7, 7> explicit_form() {
  Eigen::Matrix<double, 7, 7> A = Eigen::Matrix<double, 7, 7>::Zero();
  A(0, 0) = 1.0;
  for (int i = 1; i <= 3; ++i) {
    A(i, i) = 2.0;
    for (int j = 1; j <= 3; ++j) A(i, j) += 2.0;
  }
  for (int i = 4; i < 7; ++i) A(i, i) = 2.0;
  return A;
}

// Finite-difference Hessian of the oracle energy, restricted to the probe basis.
double fd_gamma(const DensityModel& m) {
  const double h = 1e-4;
  const Eigen::Matrix<double, 10, 7> P = symmetric_probe_basis();
  auto W = [&](const Eigen::Matrix<double, 10, 1>& x) {
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
    for (int k = 0; k < 9; ++k) F(k / 3, k % 3) += x(1 + k);
    return oracle::energy(m, x(0), F);
  };
  Eigen::Matrix<double, 7, 7> H;
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      const auto ea = P.col(a), eb = P.col(b);
      H(a, b) = (W(h * (ea + eb)) - W(h * (ea - eb)) - W(h * (eb - ea)) + W(-h * (ea + eb))) /
                (4 * h * h);
    }
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>>(H).eigenvalues()(0);
}

}  // namespace

TEST_CASE("coercivity constant without prestrain") {
  const DensityModel w1 = oracle::model(BaseKind::W01, 2.0, Eigen::Matrix3d::Zero());
  const DensityModel w2 = oracle::model(BaseKind::W02, 2.0, Eigen::Matrix3d::Zero());
  const double expected =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>>(explicit_form()).eigenvalues()(0);
  CHECK(expected == doctest::Approx(1.0).epsilon(1e-12));

  const CoercivityReport r1 = coercivity_check(w1);
  CHECK(r1.pass);
  CHECK(std::abs(r1.gamma_estimate - 1.0) < 1e-6);
  const Eigen::Matrix<double, 7, 1> full =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>>(explicit_form()).eigenvalues();
  CHECK((r1.spectrum - full).norm() < 1e-10);
  CHECK(std::abs(coercivity_check(w2).gamma_estimate - r1.gamma_estimate) < 1e-8);
}

TEST_CASE("coercivity with prestrain matches a finite-difference Hessian") {
  for (double m : {0.05, 0.1, 0.3}) {
    CAPTURE(m);
    const Eigen::Matrix3d mb = m * Eigen::Matrix3d::Identity();
    const DensityModel w1 = oracle::model(BaseKind::W01, 2.0, mb);
    const DensityModel w2 = oracle::model(BaseKind::W02, 2.0, mb);
    const CoercivityReport r = coercivity_check(w1);
    CHECK(r.pass);
    CHECK(r.gamma_estimate > 0.0);
    CHECK(r.gamma_estimate == doctest::Approx(fd_gamma(w1)).epsilon(1e-5));
    CHECK(std::abs(coercivity_check(w2).gamma_estimate - r.gamma_estimate) < 1e-8);
  }
}

TEST_CASE("probe basis is orthonormal and symmetric") {
  const Eigen::Matrix<double, 10, 7> P = symmetric_probe_basis();
  CHECK((P.transpose() * P - Eigen::Matrix<double, 7, 7>::Identity()).norm() < 1e-14);
  for (int c = 0; c < 7; ++c)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(P(1 + 3 * i + j, c) == P(1 + 3 * j + i, c));
}

TEST_CASE("distance to SO(3)") {
  std::mt19937_64 rng(1);
  for (int s = 0; s < 10; ++s) CHECK(dist_to_SO3(random_rotation(rng)) < 1e-12);
  CHECK(dist_to_SO3(2.0 * Eigen::Matrix3d::Identity()) == doctest::Approx(std::sqrt(3.0)));
  const Eigen::Matrix3d reflect = Eigen::Vector3d(-1, 1, 1).asDiagonal();
  CHECK(dist_to_SO3(reflect) == doctest::Approx(2.0));

  // Brute force over sampled rotations never beats the closed form.
  for (int s = 0; s < 5; ++s) {
    const Eigen::Matrix3d F = oracle::near_identity(rng, 0.8);
    const double d = dist_to_SO3(F);
    double best = 1e300;
    for (int k = 0; k < 20000; ++k) best = std::min(best, (F - random_rotation(rng)).norm());
    CHECK(best >= d - 1e-12);
    CHECK(best < d + 0.1);
  }
}

TEST_CASE("axiom check") {
  const AxiomReport w01 = axiom_check({BaseKind::W01, 2.0}, 10000, 42);
  CHECK(w01.all_passed());
  CHECK(w01.samples == 10000);
  CHECK(w01.axiom[2].measure == 0.0);
  CHECK(w01.axiom[3].measure > 0.0);
  CHECK(axiom_check({BaseKind::W02, 3.0}, 2000, 1).all_passed());

  const AxiomReport cs = axiom_check({BaseKind::CaseStudy, 2.0}, 2000, 42);
  CHECK_FALSE(cs.all_passed());
  CHECK(cs.axiom[0].passed);
  CHECK(cs.axiom[2].passed);
  CHECK_FALSE(cs.axiom[3].passed);
  REQUIRE(cs.axiom[3].witness.has_value());
  CHECK(cs.axiom[3].witness_energy == doctest::Approx(0.0));
  CHECK(std::abs(cs.axiom[3].witness_dist2 - 4.0) < 1e-6);
  CHECK(std::abs(cs.axiom[3].witness->determinant() + 1.0) < 1e-12);
}

TEST_CASE("appendix inequality") {
  const AppendixReport zero = appendix_inequality_check(0.5, Eigen::Matrix3d::Zero(), 20000, 3);
  CHECK(zero.criterion_holds);
  CHECK(zero.sampled_min_margin >= 0.0);
  CHECK_FALSE(zero.counterexample_found);

  // |M_B| = 1 via a diagonal generator with unit Frobenius norm.
  const Eigen::Matrix3d mb = Eigen::Vector3d(1, 0, 0).asDiagonal();
  const AppendixReport r = appendix_inequality_check(0.3, mb, 100000, 5);
  CHECK(r.generator_norm == doctest::Approx(1.0));
  CHECK(r.criterion_value == doctest::Approx(1 - 0.3 - 0.3 / 0.7));
  CHECK(r.criterion_holds);
  CHECK(r.sampled_min_margin >= -1e-10);
  CHECK(r.exact_min_margin <= r.sampled_min_margin + 1e-12);

  const AppendixReport near_one = appendix_inequality_check(0.99, 0.5 * Eigen::Matrix3d::Identity(),
                                                            5000, 9);
  CHECK_FALSE(near_one.criterion_holds);
  CHECK(near_one.criterion_value < 0.0);

  // The criterion is sufficient: whenever it holds, sampling finds no violation.
  std::mt19937_64 rng(12);
  for (int s = 0; s < 20; ++s) {
    const Eigen::Matrix3d g = oracle::random_symmetric(rng, 0.5);
    const double c = std::uniform_real_distribution<double>(0.01, 0.9)(rng);
    const AppendixReport t = appendix_inequality_check(c, g, 2000, s);
    if (t.criterion_holds) CHECK(t.exact_min_margin >= -1e-10);
  }
}
