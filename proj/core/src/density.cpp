#include "prestrain/density.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prestrain/constitutive.hpp"

namespace prestrain {

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::W01:
      return "W01";
    case BaseKind::W02:
      return "W02";
    case BaseKind::CaseStudy:
      return "CaseStudy";
  }
  return "?";
}

std::string to_string(Composition composition) {
  switch (composition) {
    case Composition::Right:
      return "Right";
    case Composition::Left:
      return "Left";
    case Composition::None:
      return "None";
  }
  return "?";
}

BaseKind parse_base_kind(const std::string& text) {
  if (text == "W01") return BaseKind::W01;
  if (text == "W02") return BaseKind::W02;
  if (text == "CaseStudy") return BaseKind::CaseStudy;
  throw std::invalid_argument("unknown base density '" + text + "' (W01, W02, CaseStudy)");
}

Composition parse_composition(const std::string& text) {
  if (text == "Right") return Composition::Right;
  if (text == "Left") return Composition::Left;
  if (text == "None") return Composition::None;
  throw std::invalid_argument("unknown composition '" + text + "' (Right, Left, None)");
}

Mat3<double> to_mat3(const Eigen::Matrix3d& m) {
  Mat3<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return r;
}

Eigen::Matrix3d to_eigen(const Mat3<double>& m) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return r;
}

SymmetricEigen eigen_symmetric(const Mat3<double>& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(to_eigen(S));
  SymmetricEigen out;
  out.vectors = to_mat3(solver.eigenvectors());
  for (int k = 0; k < 3; ++k) out.values[k] = solver.eigenvalues()(k);
  return out;
}

Mat3<double> sqrt_deviation(const Mat3<double>& E) {
  const double norm = std::sqrt(dot(E, E));
  if (norm <= 0.25) {
    // Y = (E - Y^2) / 2 contracts with factor ~|Y| here.
    Mat3<double> Y = E * 0.5 - (E * E) * 0.125;
    for (int iter = 0; iter < 100; ++iter) {
      Mat3<double> next = (E - Y * Y) * 0.5;
      double change = 0.0;
      for (int k = 0; k < 9; ++k) change = std::max(change, std::abs(next.a[k] - Y.a[k]));
      Y = next;
      if (change <= 1e-15 * norm) break;
    }
    return Y;
  }
  const SymmetricEigen eig = eigen_symmetric(E);
  std::array<double, 3> y;
  for (int k = 0; k < 3; ++k) {
    const double e = eig.values[k];
    // An eigenvalue of I + E that rounded to zero is taken as zero.
    const double floor = -64.0 * std::numeric_limits<double>::epsilon() * (1.0 + norm);
    if (!(1.0 + e > floor)) throw NotSPD(1.0 + e);
    y[k] = 1.0 + e > 0.0 ? e / (std::sqrt(1.0 + e) + 1.0) : -1.0;
  }
  Mat3<double> Y;
  const Mat3<double>& Q = eig.vectors;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      Y(i, j) = Q(i, 0) * Q(j, 0) * y[0] + Q(i, 1) * Q(j, 1) * y[1] + Q(i, 2) * Q(j, 2) * y[2];
  return Y;
}

PrestrainMap::PrestrainMap() : PrestrainMap(0.1 * Eigen::Matrix3d::Identity()) {}

PrestrainMap::PrestrainMap(const Eigen::Matrix3d& m_b) : m_b_(m_b) {
  if ((m_b - m_b.transpose()).norm() > 1e-14 * std::max(1.0, m_b.norm()))
    throw std::invalid_argument("prestrain generator M_B must be symmetric");
  m_b_ = 0.5 * (m_b + m_b.transpose());
  const SymmetricEigen eig = eigen_symmetric(to_mat3(m_b_));
  q_ = eig.vectors;
  lambda_ = eig.values;
  zero_ = m_b_.isZero(0.0);
  isotropic_ = (m_b_ - m_b_(0, 0) * Eigen::Matrix3d::Identity()).isZero(0.0);
  if (isotropic_) {
    q_ = Mat3<double>::identity();
    lambda_.fill(m_b_(0, 0));
  }
}

Eigen::Matrix3d PrestrainMap::operator()(double phi) const {
  Eigen::Matrix3d Q = to_eigen(q_);
  Eigen::Vector3d d(std::exp(phi * lambda_[0]), std::exp(phi * lambda_[1]),
                    std::exp(phi * lambda_[2]));
  return Q * d.asDiagonal() * Q.transpose();
}

Eigen::Matrix3d PrestrainMap::derivative(double phi) const { return m_b_ * (*this)(phi); }

void DensityModel::validate() const {
  if (base.kind != BaseKind::CaseStudy && !(base.q >= 2.0) )
    throw std::invalid_argument("density exponent q must be >= 2 (q in (1, 2) is unsupported)");
  if (!std::isfinite(base.q)) throw std::invalid_argument("density exponent q must be finite");
}

double DensityValue::get() const {
  if (!in_domain) throw OutOfDomain(det);
  return value;
}

DensityValue eval_density(const DensityModel& model, double phi, const Eigen::Matrix3d& F) {
  DensityValue out;
  try {
    const Response<double> r = respond(model, phi, to_mat3(F), false);
    out.value = r.energy;
    out.det = r.det;
  } catch (const OutOfDomain& e) {
    out.in_domain = false;
    out.det = e.determinant();
    out.value = 0.0;
  }
  return out;
}

Eigen::Matrix3d sqrt_spd(const Eigen::Matrix3d& S, double tol) {
  if ((S - S.transpose()).norm() > 1e-12 * std::max(1.0, S.norm()))
    throw NotSPD(std::nan(""));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(0.5 * (S + S.transpose()));
  const Eigen::Vector3d lam = solver.eigenvalues();
  const double threshold = tol * std::max(1.0, S.norm());
  if (lam(0) <= threshold) throw NotSPD(lam(0));
  return solver.eigenvectors() * lam.cwiseSqrt().asDiagonal() * solver.eigenvectors().transpose();
}

Eigen::Matrix3d DerivativeStack::dF() const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = d1[1 + 3 * i + j];
  return m;
}

Eigen::Matrix<double, DerivativeStack::dim, DerivativeStack::dim> DerivativeStack::hessian() const {
  Eigen::Matrix<double, dim, dim> h;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) h(i, j) = second(i, j);
  return h;
}

namespace {

template <int Order>
DerivativeStack derivatives_impl(const DensityModel& model, double phi, const Eigen::Matrix3d& F) {
  using L = Layout<10, Order>;
  using J = Jet<L>;
  constexpr int n = DerivativeStack::dim;

  const J jphi = J::variable(0, phi);
  Mat3<J> jF;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) jF(i, j) = J::variable(1 + 3 * i + j, F(i, j));
  const J w = respond(model, jphi, jF, false).energy;

  DerivativeStack s;
  s.order = Order;
  s.value = w.value();
  typename L::Exponent e{};
  for (int i = 0; i < n; ++i) {
    e.fill(0);
    e[i] = 1;
    s.d1[i] = w.derivative(e);
  }
  if constexpr (Order >= 2) {
    s.d2.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        e.fill(0);
        ++e[i];
        ++e[j];
        s.d2[i * n + j] = w.derivative(e);
      }
  }
  if constexpr (Order >= 3) {
    s.d3.resize(n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          e.fill(0);
          ++e[i];
          ++e[j];
          ++e[k];
          s.d3[(i * n + j) * n + k] = w.derivative(e);
        }
  }
  if constexpr (Order >= 4) {
    s.d4.resize(n * n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            e.fill(0);
            ++e[i];
            ++e[j];
            ++e[k];
            ++e[l];
            s.d4[((i * n + j) * n + k) * n + l] = w.derivative(e);
          }
  }
  return s;
}

}  // namespace

DerivativeStack derivatives(const DensityModel& model, double phi, const Eigen::Matrix3d& F,
                            int order) {
  switch (order) {
    case 1:
      return derivatives_impl<1>(model, phi, F);
    case 2:
      return derivatives_impl<2>(model, phi, F);
    case 3:
      return derivatives_impl<3>(model, phi, F);
    case 4:
      return derivatives_impl<4>(model, phi, F);
    default:
      throw std::invalid_argument("derivatives: order must lie in [1, 4]");
  }
}

double second_directional(const DensityModel& model, double phi, const Eigen::Matrix3d& F,
                          double dphi, const Eigen::Matrix3d& dF) {
  using J = Jet<Layout<1, 2>>;
  const J t = J::variable(0, 0.0);
  const J jphi = phi + dphi * t;
  Mat3<J> jF;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) jF(i, j) = F(i, j) + dF(i, j) * t;
  const J w = respond(model, jphi, jF, false).energy;
  return 2.0 * w[2];
}

}  // namespace prestrain
