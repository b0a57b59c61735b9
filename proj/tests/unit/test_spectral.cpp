#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "prestrain/error.hpp"
#include "prestrain/initial_data.hpp"
#include "prestrain/spectral.hpp"

using namespace prestrain;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const Samples<1>& a, const Samples<1>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.nodes(); ++i) e = std::max(e, std::abs(a.at(0, i) - b.at(0, i)));
  return e;
}

ScalarField smooth(const GridPtr& g) {
  return scalar_from_function(g, [](double x, double y, double z) {
    return std::sin(x) * std::cos(2 * y) + 0.3 * std::cos(x + y - 3 * z) + 0.1 * std::sin(4 * z);
  });
}

}  // namespace

TEST_CASE("grid tables") {
  const GridPtr g = Grid::create(32);
  CHECK(g->node_count() == 32768);
  CHECK(g->mode_count() == 32u * 32u * 17u);
  CHECK(g->dealias_cutoff() == 10);
  CHECK(g->spacing() == doctest::Approx(2 * pi / 32));
  CHECK(Grid::create(32).get() == g.get());

  double total_weight = 0.0;
  for (std::size_t m = 0; m < g->mode_count(); ++m) {
    const int i2 = g->index(2, m);
    const double expected = (i2 == 0 || i2 == 16) ? 1.0 : 2.0;
    CHECK(g->parseval_weight(m) == expected);
    double k2 = 0.0;
    int mx = 0;
    for (int d = 0; d < 3; ++d) {
      k2 += g->wavenumber(d, m) * g->wavenumber(d, m);
      mx = std::max(mx, std::abs(g->index(d, m)));
    }
    CHECK(g->k_squared(m) == doctest::Approx(k2));
    CHECK(g->max_index(m) == mx);
    CHECK(g->retained(m) == (mx <= 10));
    total_weight += g->parseval_weight(m);
  }
  CHECK(total_weight == doctest::Approx(32.0 * 32.0 * 32.0));
}

TEST_CASE("round trip and single mode coefficients") {
  const GridPtr g = Grid::create(16);
  const ScalarField f = scalar_from_function(g, [](double x, double, double) { return std::cos(3 * x); });
  // cos(3x) = (e^{3ix} + e^{-3ix}) / 2
  double found = 0.0;
  for (std::size_t m = 0; m < g->mode_count(); ++m)
    if (std::abs(g->index(0, m)) == 3 && g->index(1, m) == 0 && g->index(2, m) == 0)
      found += std::abs(f.data()[m]);
  CHECK(found == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Samples<1> s(g);
  for (auto& v : s.values) v = u(rng);
  const Samples<1> back = to_physical(from_physical(s, false));
  CHECK(max_abs_diff(s, back) < 1e-13);
}

TEST_CASE("partial derivatives match analytic ones") {
  const GridPtr g = Grid::create(32);
  const ScalarField f = smooth(g);
  const Samples<1> dx = to_physical(partial(f, {0}));
  const Samples<1> dyz = to_physical(partial(f, {1, 2}));
  const Samples<1> lap = to_physical(laplacian(f));
  const Samples<1> ex_dx = to_physical(scalar_from_function(g, [](double x, double y, double z) {
    return std::cos(x) * std::cos(2 * y) - 0.3 * std::sin(x + y - 3 * z);
  }));
  const Samples<1> ex_dyz = to_physical(scalar_from_function(g, [](double x, double y, double z) {
    return 0.3 * 3 * std::cos(x + y - 3 * z);
  }));
  const Samples<1> ex_lap = to_physical(scalar_from_function(g, [](double x, double y, double z) {
    return -5 * std::sin(x) * std::cos(2 * y) - 0.3 * 11 * std::cos(x + y - 3 * z) -
           1.6 * std::sin(4 * z);
  }));
  CHECK(max_abs_diff(dx, ex_dx) < 1e-12);
  CHECK(max_abs_diff(dyz, ex_dyz) < 1e-12);
  CHECK(max_abs_diff(lap, ex_lap) < 1e-11);

  const VectorField grad = gradient(f);
  const ScalarField div = divergence(grad);
  CHECK(max_abs_diff(to_physical(div), lap) < 1e-11);
}

TEST_CASE("Parseval agrees with a node sum") {
  const GridPtr g = Grid::create(16);
  std::mt19937_64 rng(3);
  const ScalarField a = random_band_field<1>(g, 5, rng, true);
  const ScalarField b = random_band_field<1>(g, 5, rng, true);
  const Samples<1> sa = to_physical(a), sb = to_physical(b);
  double node_sum = 0.0;
  for (std::size_t i = 0; i < sa.nodes(); ++i) node_sum += sa.at(0, i) * sb.at(0, i);
  node_sum *= g->volume() / static_cast<double>(g->node_count());
  CHECK(inner_product(a, b) == doctest::Approx(node_sum).epsilon(1e-12));
}

TEST_CASE("Sobolev norms of a single mode") {
  const GridPtr g = Grid::create(16);
  // sin(x + 2y) has |k|^2 = 5 and L2 norm^2 = (2 pi)^3 / 2.
  const ScalarField f =
      scalar_from_function(g, [](double x, double y, double) { return std::sin(x + 2 * y); });
  const double l2sq = std::pow(2 * pi, 3) / 2;
  for (int s = 0; s <= 4; ++s)
    CHECK(sobolev_norm(f, s) == doctest::Approx(std::sqrt(l2sq * std::pow(6.0, s))));
  CHECK(gradient_sobolev_norm_squared(f, 1) == doctest::Approx(l2sq * 5 * 6));
  CHECK(hessian_sobolev_norm_squared(f, 0) == doctest::Approx(l2sq * 25));
  CHECK_THROWS_AS(sobolev_norm(f, 5), std::invalid_argument);
}

TEST_CASE("inverse Laplacian") {
  const GridPtr g = Grid::create(16);
  std::mt19937_64 rng(11);
  const ScalarField f = random_band_field<1>(g, 5, rng, false);
  const ScalarField psi = inverse_laplacian(f);
  const ScalarField back = -1.0 * laplacian(psi);
  CHECK(l2_norm(back - f) < 1e-13 * l2_norm(f));
  CHECK(psi.mean() == 0.0);

  ScalarField shifted = f;
  shifted.data()[0] = 0.5;
  CHECK_THROWS_AS(inverse_laplacian(shifted), NonZeroMean);
  CHECK_NOTHROW(inverse_laplacian(shifted, 1.0));
}

TEST_CASE("truncation, dealiasing and hermitian symmetry") {
  const GridPtr g = Grid::create(16);
  std::mt19937_64 rng(5);
  const ScalarField f = random_band_field<1>(g, 7, rng, true);
  CHECK(is_hermitian(f));
  const ScalarField t = truncate_modes(f, 2);
  for (std::size_t m = 0; m < g->mode_count(); ++m)
    if (g->max_index(m) > 2) CHECK(t.data()[m] == Complex(0.0));
  CHECK(is_hermitian(t));
  CHECK_THROWS_AS(truncate_modes(f, 9), std::invalid_argument);

  ScalarField d = f;
  apply_dealias(d);
  for (std::size_t m = 0; m < g->mode_count(); ++m)
    if (!g->retained(m)) CHECK(d.data()[m] == Complex(0.0));

  ScalarField broken = f;
  broken.data()[9] += Complex(0.0, 1.0);  // (0, 1, 0) lies in the constrained kz = 0 plane
  CHECK_FALSE(is_hermitian(broken));
}

TEST_CASE("pointwise_map") {
  const GridPtr g = Grid::create(16);
  const ScalarField a =
      scalar_from_function(g, [](double x, double, double) { return std::cos(x); });
  const ScalarField b =
      scalar_from_function(g, [](double, double y, double) { return std::sin(y); });
  // cos(x) sin(y) is band limited below the cutoff, so the product is exact.
  const ScalarField p = pointwise_map<1>(
      [](const std::array<double, 1>& u, const std::array<double, 1>& v) {
        return std::array<double, 1>{u[0] * v[0]};
      },
      a, b);
  const ScalarField ex =
      scalar_from_function(g, [](double x, double y, double) { return std::cos(x) * std::sin(y); });
  CHECK(l2_norm(p - ex) < 1e-13);

  const GridPtr other = Grid::create(8);
  const ScalarField c(other);
  CHECK_THROWS_AS(a + c, GridMismatch);
  CHECK_THROWS_AS(pointwise_map<1>([](const std::array<double, 1>& u,
                                      const std::array<double, 1>&) { return u; },
                                   a, c),
                  GridMismatch);
}
