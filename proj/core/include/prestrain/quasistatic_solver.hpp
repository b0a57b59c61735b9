#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "prestrain/acoustic.hpp"
#include "prestrain/density.hpp"
#include "prestrain/state.hpp"

namespace prestrain {

/// Linearization of the elliptic-parabolic system at (0, I): stiffness C,
/// coupling G = d^2W/dphi dF, a = d^2W/dphi^2, and per-mode data derived
/// from the acoustic matrices A(k) of the retained modes.
struct LinearizedSymbols {
  GridPtr grid;
  Stiffness C;
  Eigen::Matrix3d G;
  double a = 0.0;

  // Per mode (zero for the mean and for discarded modes).
  std::vector<Eigen::Matrix3d> A_inverse;
  std::vector<Eigen::Vector3d> Gk;
  /// Decay rate |k|^2 (a - (Gk)^T A^{-1} (Gk)) of the Schur-complemented phi equation.
  std::vector<double> rate;
  double min_acoustic_eigenvalue = 0.0;
};

/// NotElliptic if some A(k) has an eigenvalue <= 0.
LinearizedSymbols assemble_symbols(const DensityModel& model, const GridPtr& grid);

/// Solves div(C : grad w + G phi) = div A_rhs for mean-zero w.
VectorField solve_linear_elliptic(const LinearizedSymbols& symbols, const MatrixField& A_rhs,
                                  const ScalarField& phi);

/// A = C : grad w + G phi - dW/dF,  B = dW/dphi - a phi - G : grad w.
/// Both vanish to second order at the equilibrium.
std::pair<MatrixField, ScalarField> residual_AB(const QuasiState& s, const DensityModel& model,
                                                const LinearizedSymbols& symbols);

/// ||div dW/dF(phi, I + grad w) - forcing||_L2
double elliptic_residual(const QuasiState& s, const DensityModel& model,
                         const VectorField* forcing = nullptr);

struct PicardStats {
  int iterations = 0;
  /// Distances between successive iterates.
  std::vector<double> distances;
  /// Largest ratio of successive distances (0 if fewer than two).
  double contraction = 0.0;
};

/// ||d phi||_H2 + ||grad d w||_H1
double picard_distance(const QuasiState& a, const QuasiState& b);

/// One time step: Picard iteration of the linearized solution operator
/// until the relative distance between iterates drops below picard_tol.
/// NoContraction when max_iter is exhausted or the distance grows.
QuasiState advance_quasistatic(const QuasiState& s, double dt, const DensityModel& model,
                               const LinearizedSymbols& symbols, double picard_tol, int max_iter,
                               PicardStats* stats = nullptr);

/// Solves the elliptic balance for w at fixed phi by the same iteration.
QuasiState equilibrate(const QuasiState& s, const DensityModel& model,
                       const LinearizedSymbols& symbols, double picard_tol, int max_iter,
                       PicardStats* stats = nullptr);

struct NewtonStats {
  std::vector<double> residuals;  // elliptic residual before each iteration and at the end
  std::vector<int> cg_iterations;
};

/// Newton polish of div dW/dF(phi, I + grad w) = forcing at fixed phi. The
/// Jacobian is applied matrix-free via directional derivatives and
/// inverted by conjugate gradients preconditioned with A(k)^{-1}.
QuasiState newton_refine(const QuasiState& s, const DensityModel& model,
                         const LinearizedSymbols& symbols, double tol, int max_iter = 10,
                         const VectorField* forcing = nullptr, NewtonStats* stats = nullptr);

}  // namespace prestrain
