#pragma once

#include <Eigen/Core>
#include <cstddef>

#include "prestrain/density.hpp"
#include "prestrain/field.hpp"

namespace prestrain {

/// What a pointwise pass over the grid should produce.
enum MaterialNeed : unsigned {
  kStress = 1u,
  kChemical = 2u,
  kEnergy = 4u,
  kAll = 7u,
};

/// Result of evaluating W at every node for (phi, I + grad w).
struct MaterialFields {
  MatrixField stress;           // dealiased dW/dF (if requested)
  ScalarField chemical;         // dealiased dW/dphi (if requested)
  double energy = 0.0;          // grid quadrature of W over the box
  double min_det = 1.0;         // min det(I + grad w) over nodes
  double max_deviation = 0.0;   // max over nodes of |phi| + |grad w|
  double stiff_phi = 0.0;       // phi at the node of max deviation
  Eigen::Matrix3d stiff_F = Eigen::Matrix3d::Identity();
};

/// Pseudo-spectral evaluation of the constitutive response. A node outside
/// the density's domain raises OutOfDomain (without a time).
MaterialFields evaluate_material(const DensityModel& model, const ScalarField& phi,
                                 const VectorField& w, unsigned need = kAll);

/// d/ds dW/dF(phi, I + grad(w + s dw)) at s = 0, dealiased.
MatrixField stress_directional(const DensityModel& model, const ScalarField& phi,
                               const VectorField& w, const VectorField& dw);

/// Minimum over nodes of det(I + grad w).
double min_det_grad_u(const VectorField& w);

}  // namespace prestrain
