#pragma once

// Independent reference implementations used as test oracles. They are
// deliberately written with Eigen's generic matrix functions rather than the
// library's closed forms.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>

#include "prestrain/density.hpp"
#include "prestrain/grid.hpp"

namespace oracle {

inline Eigen::Matrix3d prestrain(const Eigen::Matrix3d& m_b, double phi) {
  const Eigen::Matrix3d a = phi * m_b;
  return a.exp();
}

inline double base_energy(prestrain::BaseKind kind, double q, const Eigen::Matrix3d& F) {
  const Eigen::Matrix3d C = F.transpose() * F;
  const double J = F.determinant();
  if (kind == prestrain::BaseKind::CaseStudy)
    return (C - Eigen::Matrix3d::Identity()).squaredNorm();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(C);
  const Eigen::Matrix3d U = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                            eig.eigenvectors().transpose();
  const double dev = (U - Eigen::Matrix3d::Identity()).squaredNorm();
  if (kind == prestrain::BaseKind::W01) return dev + std::pow(std::abs(std::log(J)), q);
  return dev + std::pow(std::abs(1.0 / J - 1.0), q);
}

/// W(phi, F) from the definition, with the composition applied literally.
inline double energy(const prestrain::DensityModel& m, double phi, const Eigen::Matrix3d& F) {
  const Eigen::Matrix3d B = prestrain(m.prestrain.generator(), phi);
  Eigen::Matrix3d G = F;
  if (m.composition == prestrain::Composition::Right) G = F * B;
  if (m.composition == prestrain::Composition::Left) G = B * F;
  double w = base_energy(m.base.kind, m.base.q, G);
  if (m.quadratic_term) w += 0.5 * phi * phi;
  return w;
}

/// Central differences of the oracle energy: returns (dW/dphi, dW/dF).
inline std::pair<double, Eigen::Matrix3d> gradient(const prestrain::DensityModel& m, double phi,
                                                   const Eigen::Matrix3d& F, double h = 1e-6) {
  const double dphi = (energy(m, phi + h, F) - energy(m, phi - h, F)) / (2 * h);
  Eigen::Matrix3d dF;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix3d Fp = F, Fm = F;
      Fp(i, j) += h;
      Fm(i, j) -= h;
      dF(i, j) = (energy(m, phi, Fp) - energy(m, phi, Fm)) / (2 * h);
    }
  return {dphi, dF};
}

inline Eigen::Matrix3d near_identity(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n;
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) F(i, j) += scale * n(rng);
  return F;
}

inline Eigen::Matrix3d random_symmetric(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n;
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = scale * n(rng);
  return 0.5 * (M + M.transpose());
}

inline prestrain::DensityModel model(prestrain::BaseKind kind, double q,
                                     const Eigen::Matrix3d& m_b,
                                     prestrain::Composition c = prestrain::Composition::Right,
                                     bool quadratic = true) {
  prestrain::DensityModel m;
  m.base = {kind, q};
  m.prestrain = prestrain::PrestrainMap(m_b);
  m.composition = c;
  m.quadratic_term = quadratic;
  return m;
}

}  // namespace oracle
