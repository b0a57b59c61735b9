#include "prestrain/certification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace prestrain {

Eigen::Matrix<double, 10, 7> symmetric_probe_basis() {
  Eigen::Matrix<double, 10, 7> V = Eigen::Matrix<double, 10, 7>::Zero();
  auto f = [](int i, int j) { return 1 + 3 * i + j; };
  V(0, 0) = 1.0;
  for (int i = 0; i < 3; ++i) V(f(i, i), 1 + i) = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  int col = 4;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j, ++col) {
      V(f(i, j), col) = r;
      V(f(j, i), col) = r;
    }
  return V;
}

CoercivityReport coercivity_check(const DensityModel& model) {
  const DerivativeStack s = derivatives(model, 0.0, Eigen::Matrix3d::Identity(), 2);
  const Eigen::Matrix<double, 10, 7> V = symmetric_probe_basis();
  const Eigen::Matrix<double, 7, 7> form = V.transpose() * s.hessian() * V;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> solver(0.5 *
                                                                    (form + form.transpose()));
  CoercivityReport r;
  r.spectrum = solver.eigenvalues();
  r.gamma_estimate = r.spectrum(0);
  r.pass = r.gamma_estimate > 0.0;
  return r;
}

double dist_to_SO3(const Eigen::Matrix3d& F) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(F);
  const Eigen::Vector3d sigma = svd.singularValues();  // descending
  double d2 = 0.0;
  if (F.determinant() >= 0.0) {
    for (int k = 0; k < 3; ++k) d2 += (sigma(k) - 1.0) * (sigma(k) - 1.0);
  } else {
    d2 = (sigma(0) - 1.0) * (sigma(0) - 1.0) + (sigma(1) - 1.0) * (sigma(1) - 1.0) +
         (sigma(2) + 1.0) * (sigma(2) + 1.0);
  }
  return std::sqrt(d2);
}

bool AxiomReport::all_passed() const {
  return std::all_of(axiom.begin(), axiom.end(), [](const AxiomResult& a) { return a.passed; });
}

namespace {

DensityModel pure(const BaseDensity& base) {
  DensityModel m;
  m.base = base;
  m.prestrain = PrestrainMap(Eigen::Matrix3d::Zero());
  m.composition = Composition::None;
  m.quadratic_term = false;
  return m;
}

Eigen::Matrix3d near_identity(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Matrix3d X;
  for (int k = 0; k < 9; ++k) X(k / 3, k % 3) = normal(rng);
  return Eigen::Matrix3d::Identity() + scale * unit(rng) * X;
}

}  // namespace

AxiomReport axiom_check(const BaseDensity& base, std::size_t samples, std::uint64_t seed) {
  const DensityModel model = pure(base);
  std::mt19937_64 rng(seed);
  AxiomReport report;
  report.samples = samples;

  // (i) frame invariance
  {
    AxiomResult& r = report.axiom[0];
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Eigen::Matrix3d F = random_rotation(rng) * near_identity(rng, 0.3);
      const Eigen::Matrix3d R = random_rotation(rng);
      const DensityValue a = eval_density(model, 0.0, F);
      const DensityValue b = eval_density(model, 0.0, R * F);
      if (a.in_domain != b.in_domain) {
        worst = std::numeric_limits<double>::infinity();
        r.witness = F;
        continue;
      }
      if (!a) continue;
      const double defect = std::abs(a.value - b.value) / (1.0 + std::abs(a.value));
      if (defect > worst) {
        worst = defect;
        r.witness = F;
      }
    }
    r.measure = worst;
    r.passed = worst <= 1e-10;
    if (r.passed) r.witness.reset();
    r.detail = "max |W0(RF) - W0(F)| / (1 + |W0(F)|)";
  }

  // (ii) growth as det F -> 0 along diag(t, 1, 1)
  {
    AxiomResult& r = report.axiom[1];
    constexpr double threshold = 1e3;
    double previous = -std::numeric_limits<double>::infinity();
    bool increasing = true;
    double last = 0.0;
    for (int k = 0; k <= 48; ++k) {
      const double t = std::ldexp(1.0, -k);
      const Eigen::Matrix3d F = Eigen::Vector3d(t, 1.0, 1.0).asDiagonal();
      const DensityValue v = eval_density(model, 0.0, F);
      if (!v) {
        increasing = false;
        break;
      }
      if (k > 0 && !(v.value > previous)) increasing = false;
      previous = v.value;
      last = v.value;
    }
    const Eigen::Matrix3d singular = Eigen::Vector3d(0.0, 1.0, 1.0).asDiagonal();
    const bool infinite_at_zero = !eval_density(model, 0.0, singular).in_domain;
    r.measure = last;
    r.passed = increasing && last > threshold && infinite_at_zero;
    std::ostringstream os;
    os << "W0(diag(t,1,1)) for t = 2^-k, k <= 48: increasing=" << increasing
       << ", final=" << last << ", out of domain at det 0=" << infinite_at_zero;
    r.detail = os.str();
  }

  // (iii) zero at the identity
  {
    AxiomResult& r = report.axiom[2];
    r.measure = eval_density(model, 0.0, Eigen::Matrix3d::Identity()).get();
    r.passed = r.measure == 0.0;
    r.detail = "W0(I)";
  }

  // (iv) W0 >= c dist^2(F, SO(3))
  {
    AxiomResult& r = report.axiom[3];
    const Eigen::Matrix3d reflection = Eigen::Vector3d(-1.0, 1.0, 1.0).asDiagonal();
    double inf_ratio = std::numeric_limits<double>::infinity();
    bool witnessed = false;
    auto probe = [&](const Eigen::Matrix3d& F) {
      const DensityValue v = eval_density(model, 0.0, F);
      if (!v) return;  // +infinity dominates any multiple of dist^2
      const double d = dist_to_SO3(F);
      const double d2 = d * d;
      if (d2 < 1e-12) return;
      const double ratio = v.value / d2;
      if (v.value <= 1e-12 * std::max(1.0, d2) && d2 >= 1e-6 && !witnessed) {
        witnessed = true;
        r.witness = F;
        r.witness_energy = v.value;
        r.witness_dist2 = d2;
      }
      inf_ratio = std::min(inf_ratio, ratio);
    };
    probe(reflection);
    for (std::size_t s = 0; s < samples; ++s) {
      const Eigen::Matrix3d R = random_rotation(rng);
      probe(R * near_identity(rng, 0.3));
      probe(R * reflection * near_identity(rng, 0.05));
    }
    r.measure = inf_ratio;
    r.passed = !witnessed && inf_ratio > 0.0;
    std::ostringstream os;
    if (witnessed)
      os << "violation witness: W0 = " << r.witness_energy << " with dist^2 = " << r.witness_dist2;
    else
      os << "sampled inf W0 / dist^2 = " << inf_ratio;
    r.detail = os.str();
  }
  return report;
}

AppendixReport appendix_inequality_check(double c, const Eigen::Matrix3d& m_b,
                                         std::size_t samples, std::uint64_t seed) {
  AppendixReport r;
  r.c = c;
  r.samples = samples;
  r.generator_norm = m_b.norm();
  const double m2 = m_b.squaredNorm();
  r.criterion_value = (c < 1.0) ? 1.0 - c - c / (1.0 - c) * m2 : -std::numeric_limits<double>::infinity();
  r.criterion_holds = c > 0.0 && c < 1.0 && r.criterion_value > 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    double p = normal(rng);
    Eigen::Matrix3d F;
    for (int k = 0; k < 9; ++k) F(k / 3, k % 3) = normal(rng);
    const double n = std::sqrt(p * p + F.squaredNorm());
    p /= n;
    F /= n;
    const Eigen::Matrix3d S = 0.5 * (F + F.transpose());
    const double margin = p * p + (S + p * m_b).squaredNorm() - c * (p * p + S.squaredNorm());
    worst = std::min(worst, margin);
  }
  r.sampled_min_margin = worst;
  r.counterexample_found = worst < -1e-10;

  // Quadratic form on (p, s) with s in an orthonormal basis of Sym(3).
  const Eigen::Matrix<double, 10, 7> V = symmetric_probe_basis();
  Eigen::Matrix<double, 6, 1> m;
  for (int col = 1; col < 7; ++col) {
    double acc = 0.0;
    for (int k = 0; k < 9; ++k) acc += V(1 + k, col) * m_b(k / 3, k % 3);
    m(col - 1) = acc;
  }
  Eigen::Matrix<double, 7, 7> Q = Eigen::Matrix<double, 7, 7>::Zero();
  Q(0, 0) = 1.0 - c + m2;
  Q.block<6, 1>(1, 0) = m;
  Q.block<1, 6>(0, 1) = m.transpose();
  Q.block<6, 6>(1, 1) = (1.0 - c) * Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> solver(Q);
  // Pure skew directions give margin 0, so the sphere minimum is at most 0.
  r.exact_min_margin = std::min(solver.eigenvalues()(0), 0.0);
  return r;
}

}  // namespace prestrain
