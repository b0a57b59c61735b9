#pragma once

#include <cmath>

#include "prestrain/density.hpp"
#include "prestrain/error.hpp"
#include "prestrain/jet.hpp"
#include "prestrain/mat3.hpp"

namespace prestrain {

struct SymmetricEigen {
  Mat3<double> vectors;  // columns
  std::array<double, 3> values;
};

SymmetricEigen eigen_symmetric(const Mat3<double>& S);

/// Y = (I + E)^(1/2) - I for symmetric E with I + E positive definite.
/// Small E never forms I + E, so Y keeps full relative precision.
Mat3<double> sqrt_deviation(const Mat3<double>& E);

/// Jet version: constant part as above, then one correction per order
/// from the Sylvester equation (I + Y0) Z + Z (I + Y0) = R in the
/// eigenbasis of Y0.
template <class L>
Mat3<Jet<L>> sqrt_deviation(const Mat3<Jet<L>>& E) {
  Mat3<double> e0;
  for (int k = 0; k < 9; ++k) e0.a[k] = E.a[k].value();
  const Mat3<double> y0 = sqrt_deviation(e0);
  Mat3<double> s0 = y0;
  for (int i = 0; i < 3; ++i) s0(i, i) += 1.0;
  const SymmetricEigen eig = eigen_symmetric(s0);
  const Mat3<double>& Q = eig.vectors;

  Mat3<Jet<L>> Y;
  for (int k = 0; k < 9; ++k) Y.a[k] = Jet<L>(y0.a[k]);
  for (int iter = 0; iter < L::order; ++iter) {
    Mat3<Jet<L>> R = E - Y * Jet<L>(2.0) - Y * Y;
    for (int m = 1; m < L::size; ++m) {
      Mat3<double> r;
      bool any = false;
      for (int k = 0; k < 9; ++k) {
        r.a[k] = R.a[k][m];
        any = any || r.a[k] != 0.0;
      }
      if (!any) continue;
      Mat3<double> t = transpose(Q) * r * Q;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t(a, b) /= eig.values[a] + eig.values[b];
      const Mat3<double> z = Q * t * transpose(Q);
      for (int k = 0; k < 9; ++k) Y.a[k][m] += z.a[k];
    }
  }
  return Y;
}

template <class T>
struct Response {
  T energy;
  Mat3<T> stress;           // dW/dF
  T chemical_potential;     // dW/dphi
  double det = 1.0;         // det of the composite deformation
};

/// Closed-form W, dW/dF and dW/dphi for double or jet scalars. Throws
/// OutOfDomain when det(F B) <= 0 for the W01/W02 bases.
template <class T>
Response<T> respond(const DensityModel& model, const T& phi, const Mat3<T>& F,
                    bool gradients = true) {
  using std::expm1;
  using std::log1p;

  Mat3<T> H = F;
  for (int i = 0; i < 3; ++i) H(i, i) -= 1.0;

  const bool prestrained =
      model.composition != Composition::None && !model.prestrain.is_zero();
  Mat3<T> K, dB;
  T k_scalar(0.0);
  const bool isotropic = prestrained && model.prestrain.is_isotropic();
  if (isotropic) {
    // B = (1 + k) I with k = expm1(lambda phi)
    const double lam = model.prestrain.eigenvalues()[0];
    k_scalar = expm1(phi * lam);
    const T b_prime = (k_scalar + 1.0) * lam;
    for (int i = 0; i < 3; ++i) {
      K(i, i) = k_scalar;
      dB(i, i) = b_prime;
    }
  } else if (prestrained) {
    const Mat3<double>& Q = model.prestrain.eigenvectors();
    const auto& lam = model.prestrain.eigenvalues();
    std::array<T, 3> e;
    for (int k = 0; k < 3; ++k) e[k] = expm1(phi * lam[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        T kij(0.0), bij(0.0);
        for (int k = 0; k < 3; ++k) {
          const double qq = Q(i, k) * Q(j, k);
          kij += e[k] * qq;
          bij += (e[k] + 1.0) * (lam[k] * qq);
        }
        K(i, j) = kij;
        K(j, i) = kij;
        dB(i, j) = bij;
        dB(j, i) = bij;
      }
  }

  Mat3<T> D;
  switch (model.composition) {
    case Composition::Right:
      D = isotropic ? H * (k_scalar + 1.0) + K : prestrained ? H + K + H * K : H;
      break;
    case Composition::Left:
      D = isotropic ? H * (k_scalar + 1.0) + K : prestrained ? K + H + K * H : H;
      break;
    case Composition::None:
      D = H;
      break;
  }
  Mat3<T> G = D;
  for (int i = 0; i < 3; ++i) G(i, i) += 1.0;
  const Mat3<T> E = D + transpose(D) + transpose(D) * D;

  Response<T> out;
  Mat3<T> P0;
  if (model.base.kind == BaseKind::CaseStudy) {
    out.energy = dot(E, E);
    out.det = value(det(G));
    if (gradients) P0 = (G * E) * T(4.0);
  } else {
    const T jm1 = det_identity_plus_minus_one(D);
    out.det = 1.0 + value(jm1);
    if (!(out.det > 0.0)) throw OutOfDomain(out.det);
    const Mat3<T> Y = sqrt_deviation(E);
    const T log_j = log1p(jm1);
    const double q = model.base.q;
    T coeff;
    if (model.base.kind == BaseKind::W01) {
      out.energy = dot(Y, Y) + pow_abs(log_j, q);
      if (gradients) coeff = pow_abs_derivative(log_j, q);
    } else {
      const T s = expm1(-log_j);
      out.energy = dot(Y, Y) + pow_abs(s, q);
      if (gradients) coeff = -(pow_abs_derivative(s, q) * (s + 1.0));
    }
    if (gradients) {
      Mat3<T> IY = Y;
      for (int i = 0; i < 3; ++i) IY(i, i) += 1.0;
      const T inv_det_iy = T(1.0) / det(IY);
      const Mat3<T> inv_iy = cofactor(IY) * inv_det_iy;
      const T inv_j = T(1.0) / (jm1 + 1.0);
      P0 = (G * (Y * inv_iy)) * T(2.0) + cofactor(G) * (coeff * inv_j);
    }
  }

  if (gradients) {
    if (!prestrained) {
      out.stress = P0;
      out.chemical_potential = T(0.0);
    } else if (isotropic) {
      out.stress = P0 * (k_scalar + 1.0);
      out.chemical_potential = dot(P0, F) * dB(0, 0);
    } else if (model.composition == Composition::Right) {
      out.stress = P0 + P0 * K;
      out.chemical_potential = dot(P0, F * dB);
    } else {
      out.stress = P0 + K * P0;
      out.chemical_potential = dot(P0, dB * F);
    }
    if (model.quadratic_term) out.chemical_potential += phi;
  } else {
    out.chemical_potential = T(0.0);
  }
  if (model.quadratic_term) out.energy += 0.5 * phi * phi;
  return out;
}

}  // namespace prestrain
