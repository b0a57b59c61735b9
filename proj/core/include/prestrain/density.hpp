#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "prestrain/mat3.hpp"

namespace prestrain {

enum class BaseKind { W01, W02, CaseStudy };
enum class Composition { Right, Left, None };

std::string to_string(BaseKind kind);
std::string to_string(Composition composition);
BaseKind parse_base_kind(const std::string& text);
Composition parse_composition(const std::string& text);

/// W01 = |(F^T F)^(1/2) - I|^2 + |log det F|^q
/// W02 = |(F^T F)^(1/2) - I|^2 + |1/det F - 1|^q
/// CaseStudy = |F^T F - I|^2
struct BaseDensity {
  BaseKind kind = BaseKind::W01;
  double q = 2.0;
};

/// B(phi) = exp(phi M_B) with M_B symmetric; stored in its eigenbasis.
class PrestrainMap {
 public:
  PrestrainMap();  // M_B = 0.1 I
  explicit PrestrainMap(const Eigen::Matrix3d& m_b);

  const Eigen::Matrix3d& generator() const { return m_b_; }
  const Mat3<double>& eigenvectors() const { return q_; }
  const std::array<double, 3>& eigenvalues() const { return lambda_; }
  bool is_zero() const { return zero_; }
  /// True when M_B is a multiple of the identity (then B(phi) is too).
  bool is_isotropic() const { return isotropic_; }

  Eigen::Matrix3d operator()(double phi) const;
  Eigen::Matrix3d derivative(double phi) const;

 private:
  Eigen::Matrix3d m_b_;
  Mat3<double> q_;
  std::array<double, 3> lambda_{};
  bool zero_ = false;
  bool isotropic_ = false;
};

/// W(phi, F) = W0(F B(phi)) (Right), W0(B(phi) F) (Left) or W0(F) (None),
/// plus phi^2 / 2 when quadratic_term is set.
struct DensityModel {
  BaseDensity base;
  PrestrainMap prestrain;
  Composition composition = Composition::Right;
  bool quadratic_term = true;

  /// Throws std::invalid_argument for unsupported parameters (q < 2).
  void validate() const;
};

/// Either a finite energy or an out-of-domain marker with the offending
/// determinant. Never an infinity.
struct DensityValue {
  bool in_domain = true;
  double value = 0.0;
  double det = 1.0;

  explicit operator bool() const { return in_domain; }
  /// The value, or OutOfDomain if outside the domain.
  double get() const;
};

DensityValue eval_density(const DensityModel& model, double phi, const Eigen::Matrix3d& F);

/// Unique SPD square root; NotSPD if an eigenvalue is <= tol * max(1, |S|).
Eigen::Matrix3d sqrt_spd(const Eigen::Matrix3d& S, double tol = 1e-14);

/// All partial derivatives of W up to the requested order at (phi, F) over
/// the coordinates x_0 = phi, x_{1 + 3i + j} = F_ij. Tensors are dense and
/// fully symmetric.
struct DerivativeStack {
  static constexpr int dim = 10;

  int order = 0;
  double value = 0.0;
  std::array<double, dim> d1{};
  std::vector<double> d2, d3, d4;

  double second(int i, int j) const { return d2[i * dim + j]; }
  double third(int i, int j, int k) const { return d3[(i * dim + j) * dim + k]; }
  double fourth(int i, int j, int k, int l) const {
    return d4[((i * dim + j) * dim + k) * dim + l];
  }
  double dphi() const { return d1[0]; }
  Eigen::Matrix3d dF() const;
  Eigen::Matrix<double, dim, dim> hessian() const;
};

/// OutOfDomain outside the domain; order must lie in [1, 4].
DerivativeStack derivatives(const DensityModel& model, double phi, const Eigen::Matrix3d& F,
                            int order);

/// D^2 W(phi, F) applied twice to (dphi, dF), by a one-variable jet.
double second_directional(const DensityModel& model, double phi, const Eigen::Matrix3d& F,
                          double dphi, const Eigen::Matrix3d& dF);

Mat3<double> to_mat3(const Eigen::Matrix3d& m);
Eigen::Matrix3d to_eigen(const Mat3<double>& m);

}  // namespace prestrain
