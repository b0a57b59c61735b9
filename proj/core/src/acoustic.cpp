#include "prestrain/acoustic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace prestrain {

Stiffness stiffness_block(const Eigen::Matrix<double, 10, 10>& hessian) {
  return hessian.block<9, 9>(1, 1);
}

Eigen::Matrix3d acoustic_matrix(const Stiffness& C, const Eigen::Vector3d& k) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m) acc += C(3 * i + j, 3 * l + m) * k(j) * k(m);
      A(i, l) = acc;
    }
  return 0.5 * (A + A.transpose());
}

std::vector<Eigen::Vector3d> retained_directions(const Grid& grid) {
  std::set<std::tuple<int, int, int>> seen;
  std::vector<Eigen::Vector3d> dirs;
  for (std::size_t m = 0; m < grid.mode_count(); ++m) {
    if (!grid.retained(m) || grid.k_squared(m) == 0.0) continue;
    int a = grid.index(0, m), b = grid.index(1, m), c = grid.index(2, m);
    const int g = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
    a /= g, b /= g, c /= g;
    // canonical sign: first nonzero component positive
    if (a < 0 || (a == 0 && (b < 0 || (b == 0 && c < 0)))) a = -a, b = -b, c = -c;
    if (!seen.insert({a, b, c}).second) continue;
    dirs.push_back(Eigen::Vector3d(a, b, c).normalized());
  }
  return dirs;
}

double max_wave_speed_squared(const Stiffness& C, const std::vector<Eigen::Vector3d>& directions) {
  double best = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (const Eigen::Vector3d& n : directions) {
    solver.computeDirect(acoustic_matrix(C, n), Eigen::EigenvaluesOnly);
    best = std::max(best, solver.eigenvalues()(2));
  }
  return best;
}

}  // namespace prestrain
