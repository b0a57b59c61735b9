#include "prestrain/spectral.hpp"

namespace prestrain {

ScalarField inverse_laplacian(const ScalarField& f, std::optional<double> mean_tol) {
  const Grid& g = *f.grid();
  const double mean = f.mean();
  const double tol = mean_tol ? *mean_tol : 1e-12 * l2_norm(f) / std::sqrt(g.volume());
  if (std::abs(mean) > tol) throw NonZeroMean(mean, tol);

  ScalarField out(f.grid());
  const Complex* z = f.data();
  Complex* psi = out.data();
  for (std::size_t m = 1; m < g.mode_count(); ++m) psi[m] = z[m] / g.k_squared(m);
  psi[0] = 0.0;
  return out;
}

}  // namespace prestrain
