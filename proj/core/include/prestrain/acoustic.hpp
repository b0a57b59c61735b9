#pragma once

#include <Eigen/Core>
#include <vector>

#include "prestrain/grid.hpp"

namespace prestrain {

/// Elasticity tensor C_ijlm stored as a 9x9 matrix at (3i + j, 3l + m).
using Stiffness = Eigen::Matrix<double, 9, 9>;

/// The F-F block of a 10x10 Hessian over (phi, F_ij).
Stiffness stiffness_block(const Eigen::Matrix<double, 10, 10>& hessian);

/// A(k)_il = C_ijlm k_j k_m.
Eigen::Matrix3d acoustic_matrix(const Stiffness& C, const Eigen::Vector3d& k);

/// Unit directions of the retained wavevectors, one per line through the
/// origin (primitive integer vectors in a half space).
std::vector<Eigen::Vector3d> retained_directions(const Grid& grid);

/// max over directions n of the largest eigenvalue of A(n).
double max_wave_speed_squared(const Stiffness& C, const std::vector<Eigen::Vector3d>& directions);

}  // namespace prestrain
