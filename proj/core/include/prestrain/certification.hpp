#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "prestrain/density.hpp"

namespace prestrain {

struct CoercivityReport {
  double gamma_estimate = 0.0;
  bool pass = false;
  /// Eigenvalues of the Hessian at (0, I) restricted to R x Sym(3), ascending.
  Eigen::Matrix<double, 7, 1> spectrum;
};

CoercivityReport coercivity_check(const DensityModel& model);

/// Orthonormal basis of R x Sym(3) inside the 10 coordinates (phi, F_ij).
Eigen::Matrix<double, 10, 7> symmetric_probe_basis();

double dist_to_SO3(const Eigen::Matrix3d& F);

/// Uniformly distributed rotation from a normalized Gaussian quaternion.
template <class Rng>
Eigen::Matrix3d random_rotation(Rng& rng);

struct AxiomResult {
  bool passed = false;
  /// (i): max frame defect; (ii): last sampled value; (iii): W0(I);
  /// (iv): sampled infimum of W0 / dist^2.
  double measure = 0.0;
  std::string detail;
  std::optional<Eigen::Matrix3d> witness;
  double witness_energy = 0.0;
  double witness_dist2 = 0.0;
};

struct AxiomReport {
  std::array<AxiomResult, 4> axiom;
  std::size_t samples = 0;
  bool all_passed() const;
};

/// Checks frame invariance, blow-up at det -> 0, zero at I and
/// SO(3)-coercivity of W0 by sampling. Never throws on violations.
AxiomReport axiom_check(const BaseDensity& base, std::size_t samples, std::uint64_t seed);

struct AppendixReport {
  double c = 0.0;
  double generator_norm = 0.0;
  /// 1 - c - c / (1 - c) |M_B|^2
  double criterion_value = 0.0;
  bool criterion_holds = false;
  double sampled_min_margin = 0.0;
  bool counterexample_found = false;
  /// Minimum of the margin over the unit sphere, from a 7x7 eigensolve.
  double exact_min_margin = 0.0;
  std::size_t samples = 0;
};

/// Margin: |p|^2 + |sym F + p M_B|^2 - c (|p|^2 + |sym F|^2) on the unit
/// sphere of R x R^{3x3}.
AppendixReport appendix_inequality_check(double c, const Eigen::Matrix3d& m_b,
                                         std::size_t samples, std::uint64_t seed);

}  // namespace prestrain

#include <random>

namespace prestrain {

template <class Rng>
Eigen::Matrix3d random_rotation(Rng& rng) {
  std::normal_distribution<double> normal;
  double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

}  // namespace prestrain
