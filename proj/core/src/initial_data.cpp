#include "prestrain/initial_data.hpp"

#include <cmath>

#include "prestrain/spectral.hpp"

namespace prestrain {

namespace {

std::size_t mode_index(int n, int kx, int ky, int kz) {
  const int half = n / 2 + 1;
  const int i0 = (kx % n + n) % n;
  const int i1 = (ky % n + n) % n;
  return (static_cast<std::size_t>(i0) * n + i1) * half + kz;
}

bool canonical(int kx, int ky, int kz) {
  return kz > 0 || (kz == 0 && (ky > 0 || (ky == 0 && kx > 0)));
}

template <class Norm>
void scale_to(Field<1>* s, Field<3>* v, double amplitude, const Norm& norm) {
  const double current = s ? norm(*s) : norm(*v);
  if (current == 0.0) return;
  const double factor = amplitude / current;
  if (s) *s *= factor;
  if (v) *v *= factor;
}

}  // namespace

template <int C>
Field<C> random_band_field(const GridPtr& grid, int band, std::mt19937_64& rng, bool include_mean) {
  std::normal_distribution<double> normal;
  Field<C> f(grid);
  const int n = grid->n();
  for (int c = 0; c < C; ++c) {
    Complex* z = f.data(c);
    if (include_mean) z[0] = normal(rng);
    for (int kz = 0; kz <= band; ++kz)
      for (int ky = -band; ky <= band; ++ky)
        for (int kx = -band; kx <= band; ++kx) {
          if (!canonical(kx, ky, kz)) continue;
          const double a = normal(rng);
          const double b = normal(rng);
          // a cos(k.x) + b sin(k.x)
          const Complex coeff(0.5 * a, -0.5 * b);
          z[mode_index(n, kx, ky, kz)] = coeff;
          if (kz == 0) z[mode_index(n, -kx, -ky, 0)] = std::conj(coeff);
        }
  }
  return f;
}

template Field<1> random_band_field<1>(const GridPtr&, int, std::mt19937_64&, bool);
template Field<3> random_band_field<3>(const GridPtr&, int, std::mt19937_64&, bool);

GridPtr make_grid(const RunConfig& config) {
  return Grid::create(config.grid.n, config.grid.L, config.grid.dealias_fraction);
}

DynamicState build_dynamic_initial(const RunConfig& config) {
  const GridPtr grid = make_grid(config);
  std::mt19937_64 rng(config.data.seed);
  DynamicState s;
  s.w = random_band_field<3>(grid, config.data.band, rng, false);
  s.v = random_band_field<3>(grid, config.data.band, rng, !config.data.mean_zero_v);
  s.phi = random_band_field<1>(grid, config.data.band, rng, !config.data.mean_zero_phi);
  const double amp = config.data.amplitude;
  scale_to(nullptr, &s.w, amp,
           [](const auto& f) { return std::sqrt(gradient_sobolev_norm_squared(f, 3)); });
  scale_to(nullptr, &s.v, amp, [](const auto& f) { return sobolev_norm(f, 3); });
  scale_to(&s.phi, nullptr, amp, [](const auto& f) { return sobolev_norm(f, 3); });
  return s;
}

QuasiState build_quasi_initial(const RunConfig& config) {
  const GridPtr grid = make_grid(config);
  std::mt19937_64 rng(config.data.seed);
  QuasiState s;
  s.w = VectorField(grid);
  s.phi = random_band_field<1>(grid, config.data.band, rng, !config.data.mean_zero_phi);
  scale_to(&s.phi, nullptr, config.data.amplitude,
           [](const auto& f) { return sobolev_norm(f, 2); });
  return s;
}

ScalarField twin_direction(const RunConfig& config) {
  const GridPtr grid = make_grid(config);
  std::mt19937_64 rng(config.data.seed ^ 0x5bd1e995a4c3f2d7ULL);
  ScalarField eta = random_band_field<1>(grid, config.data.band, rng, false);
  eta *= 1.0 / l2_norm(eta);
  return eta;
}

}  // namespace prestrain
