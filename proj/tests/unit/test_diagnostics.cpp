#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "prestrain/config.hpp"
#include "prestrain/diagnostics.hpp"
#include "prestrain/error.hpp"
#include "prestrain/initial_data.hpp"
#include "prestrain/material.hpp"
#include "prestrain/runner.hpp"
#include "prestrain/spectral.hpp"
#include "prestrain/state.hpp"
#include "support.hpp"

using namespace prestrain;

namespace {

const double kHalfVolume = std::pow(2 * std::numbers::pi, 3) / 2;  // ||sin(k.x)||^2

DensityModel w1(double m) {
  return oracle::model(BaseKind::W01, 2.0, m * Eigen::Matrix3d::Identity());
}

DynamicState smooth_state(const GridPtr& g, double amp) {
  DynamicState s = DynamicState::zero(g);
  s.phi = scalar_from_function(g, [&](double x, double y, double z) {
    return amp * (std::sin(x + 2 * y) + 0.5 * std::cos(z));
  });
  s.w = field_from_function<3>(g, [&](double x, double y, double z) {
    return std::array<double, 3>{amp * std::cos(y + z), amp * std::sin(x),
                                 0.5 * amp * std::sin(x + y - z)};
  });
  s.v = field_from_function<3>(g, [&](double x, double, double z) {
    return std::array<double, 3>{0.0, amp * std::cos(x - z), 0.0};
  });
  return s;
}

DynamicState random_dynamic(int n, double amp, std::uint64_t seed) {
  RunConfig c;
  c.grid.n = n;
  c.data.amplitude = amp;
  c.data.seed = seed;
  return build_dynamic_initial(c);
}

int triple_index(int i, int j, int k) {
  for (int t = 0; t < 10; ++t) {
    const Triple& tr = sorted_triples()[t];
    if (tr.i == i && tr.j == j && tr.k == k) return t;
  }
  return -1;
}

DiagnosticsRecord sample_record(double t) {
  DiagnosticsRecord r;
  r.t = t;
  r.E0 = 0.1 + t / 3.0;
  r.dissipation = 1e-7 * t;
  r.E_big = t > 0.5 ? std::optional<double>() : std::optional<double>(1.0 / 7.0);
  r.Z_big = 12.5;
  r.E_eps = r.E0 + 1e-17;
  r.mean_phi = -3.25e-9;
  r.mean_v = {1e-300, 0.0, -2.0};
  r.min_det_grad_u = 0.99999999;
  if (t > 0.2) r.picard_iters = 4;
  return r;
}

}  // namespace

TEST_CASE("diagnostics.csv layout and round trip") {
  CHECK(csv_header() ==
        "t,E0,dissipation,E_big,Z_big,E_eps,xi_running,mean_phi,mean_v_x,mean_v_y,mean_v_z,"
        "min_det_grad_u,picard_iters");
  std::vector<DiagnosticsRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(sample_record(0.1 * i));

  std::ostringstream first;
  write_csv(first, records);
  std::istringstream in(first.str());
  const std::vector<DiagnosticsRecord> back = read_csv(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].t == records[i].t);
    CHECK(back[i].E0 == records[i].E0);
    CHECK(back[i].E_big == records[i].E_big);
    CHECK(back[i].E_eps == records[i].E_eps);
    CHECK_FALSE(back[i].xi_running.has_value());
    CHECK(back[i].mean_v == records[i].mean_v);
    CHECK(back[i].picard_iters == records[i].picard_iters);
  }
  std::ostringstream second;
  write_csv(second, back);
  CHECK(second.str() == first.str());

  // Missing values are empty cells.
  const std::string row = csv_row(records[9]);
  CHECK(row.find(",,") != std::string::npos);

  std::istringstream bad_count(csv_header() + "\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad_count), ParseError);
  std::istringstream bad_number(csv_header() + "\n1,x,0,,,,,0,0,0,0,1,\n");
  CHECK_THROWS_AS(read_csv(bad_number), ParseError);
  std::istringstream bad_header("t,E0\n");
  CHECK_THROWS_AS(read_csv(bad_header), ParseError);
}

TEST_CASE("records are bit-stable through a serialized state") {
  const DynamicState s = random_dynamic(16, 1e-2, 5);
  const DensityModel m = w1(0.1);
  std::stringstream blob;
  write_state(blob, s);
  const DynamicState r = read_dynamic_state(blob);
  const auto rec_a = dynamic_record(s, evaluate_material(m, s.phi, s.w), 0.01);
  const auto rec_b = dynamic_record(r, evaluate_material(m, r.phi, r.w), 0.01);
  CHECK(csv_row(rec_a) == csv_row(rec_b));
}

TEST_CASE("energies of simple states") {
  const GridPtr g = Grid::create(16);
  const DensityModel m = w1(0.1);
  const DynamicState zero = DynamicState::zero(g);
  CHECK(energy_E0(zero, m) == 0.0);
  CHECK(dissipation_rate(zero, m) == 0.0);

  DynamicState s = zero;
  const double amp = 0.3;
  s.v = field_from_function<3>(g, [&](double, double y, double) {
    return std::array<double, 3>{amp * std::sin(y), 0.0, 0.0};
  });
  CHECK(kinetic_energy(s.v) == doctest::Approx(0.5 * amp * amp * kHalfVolume));
  CHECK(energy_E0(s, m) == doctest::Approx(0.5 * amp * amp * kHalfVolume).epsilon(1e-12));
  CHECK(energy_E0_unnormalized(energy_E0(s, m)) == doctest::Approx(amp * amp * kHalfVolume));

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DynamicState r = random_dynamic(8, 0.05, seed);
    CHECK(energy_E0(r, m) >= 0.0);
    CHECK(dissipation_rate(r, m) >= 0.0);
  }

  const VectorField w = field_from_function<3>(g, [](double x, double, double) {
    return std::array<double, 3>{0.0, std::sin(x), 0.0};
  });
  CHECK(energy_E_eps(1.0, w, 0.2) == doctest::Approx(1.0 + 0.1 * kHalfVolume));
}

TEST_CASE("dissipation paths agree") {
  const GridPtr g = Grid::create(16);
  // mu = sin(x) + 3: ||grad(mu - mean)||^2 = ||cos x||^2.
  const ScalarField mu = scalar_from_function(g, [](double x, double, double) {
    return std::sin(x) + 3.0;
  });
  const DissipationPaths p = dissipation_paths(mu);
  CHECK(p.direct == doctest::Approx(kHalfVolume));
  CHECK(p.through_inverse == doctest::Approx(kHalfVolume));
  CHECK(dissipation_rate(mu) == doctest::Approx(kHalfVolume));

  const DensityModel m = w1(0.1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DynamicState s = random_dynamic(16, 2e-2, seed);
    const DissipationPaths q =
        dissipation_paths(evaluate_material(m, s.phi, s.w, kChemical).chemical);
    CHECK(std::abs(q.direct - q.through_inverse) <= 1e-10 * q.direct);
  }
}

TEST_CASE("energy law residual on a synthetic trajectory") {
  // E(t) = e^{-t} dissipates at rate e^{-t}; the trapezoid error is O(h^2).
  auto trajectory = [](double h, bool with_eps) {
    std::vector<DiagnosticsRecord> rs;
    for (int i = 0; i * h <= 1.0 + 1e-12; ++i) {
      DiagnosticsRecord r;
      r.t = i * h;
      r.E0 = std::exp(-r.t);
      r.dissipation = std::exp(-r.t);
      if (with_eps) r.E_eps = r.E0;
      rs.push_back(r);
    }
    return rs;
  };
  const double r1 = energy_law_residual(trajectory(0.02, false));
  const double r2 = energy_law_residual(trajectory(0.01, false));
  CHECK(r1 < 1e-4);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.02));
  CHECK(energy_law_residual(trajectory(0.01, true), true) == r2);
  CHECK_THROWS_AS(energy_law_residual(trajectory(0.01, false), true), std::invalid_argument);

  std::vector<DiagnosticsRecord> flat(5);
  for (int i = 0; i < 5; ++i) flat[i].t = i;
  CHECK(energy_law_residual(flat) == 0.0);
}

TEST_CASE("correction tensors match an explicit chain-rule assembly") {
  const GridPtr g = Grid::create(16);
  const DensityModel m = w1(0.1);
  const DynamicState s = smooth_state(g, 0.05);
  const auto R = correction_R(s.phi, s.w, m);

  // z = (phi, F) at the node with first and second spatial derivatives.
  const MatrixField F = gradient(s.w);
  auto component = [&](int a, std::initializer_list<int> dims) {
    if (a == 0) return to_physical(partial(s.phi, dims));
    MatrixField d = partial(F, dims);
    ScalarField c(g);
    for (std::size_t q = 0; q < g->mode_count(); ++q) c.data()[q] = d.data(a - 1)[q];
    return to_physical(c);
  };
  for (std::size_t node : {std::size_t{0}, std::size_t{1234}, std::size_t{3001}}) {
    CAPTURE(node);
    double z[10], z1[3][10], z2[3][3][10];
    for (int a = 0; a < 10; ++a) {
      z[a] = component(a, {}).at(0, node);
      for (int i = 0; i < 3; ++i) {
        z1[i][a] = component(a, {i}).at(0, node);
        for (int j = 0; j < 3; ++j) z2[i][j][a] = component(a, {i, j}).at(0, node);
      }
    }
    Eigen::Matrix3d Fn;
    for (int k = 0; k < 9; ++k) Fn(k / 3, k % 3) = z[1 + k];
    Fn += Eigen::Matrix3d::Identity();
    const DerivativeStack d = derivatives(m, z[0], Fn, 4);

    for (int t = 0; t < 10; ++t) {
      const Triple tr = sorted_triples()[t];
      const int i = tr.i, j = tr.j, k = tr.k;
      double expected = 0.0;
      for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) {
          const double h = d.third(0, a, b);
          expected += h * (z2[i][k][a] * z1[j][b] + z1[k][a] * z2[i][j][b] + z2[j][k][a] * z1[i][b]);
          for (int c = 0; c < 10; ++c)
            expected += d.fourth(0, a, b, c) * z1[k][a] * z1[j][b] * z1[i][c];
        }
      const double got = to_physical(R[t]).at(0, node);
      CAPTURE(t);
      CHECK(std::abs(got - expected) < 1e-10 * (std::abs(expected) + 1e-8));
    }
  }

  // The single-triple overload sorts its indices.
  CHECK(l2_norm(correction_R(s.phi, s.w, m, 2, 0, 1) - R[triple_index(0, 1, 2)]) == 0.0);

  const DynamicState zero = DynamicState::zero(g);
  for (const auto& f : correction_R(zero.phi, zero.w, m)) CHECK(l2_norm(f) == 0.0);

  std::vector<double> amps{1e-1, 1e-2, 1e-3}, norms;
  for (double a : amps) {
    const DynamicState sa = smooth_state(g, a);
    double acc = 0.0;
    for (const auto& f : correction_R(sa.phi, sa.w, m)) acc += std::pow(l2_norm(f), 2);
    norms.push_back(std::sqrt(acc));
  }
  CHECK(loglog_slope(amps, norms) >= 1.95);
}

TEST_CASE("sorted triples") {
  int total = 0;
  for (const Triple& t : sorted_triples()) {
    CHECK(t.i <= t.j);
    CHECK(t.j <= t.k);
    const int distinct = 1 + (t.i != t.j) + (t.j != t.k);
    CHECK(t.multiplicity == (distinct == 3 ? 6 : distinct == 2 ? 3 : 1));
    total += t.multiplicity;
  }
  CHECK(total == 27);
}

TEST_CASE("a-priori quantities") {
  const GridPtr g = Grid::create(16);
  const DensityModel m = w1(0.1);
  const DynamicState zero = DynamicState::zero(g);
  CHECK(apriori_Z(zero) == 0.0);
  CHECK(apriori_E(zero, m) == 0.0);

  DynamicState single = zero;
  single.phi = scalar_from_function(g, [](double x, double, double) { return std::sin(x); });
  CHECK(apriori_Z(single) == doctest::Approx(8 * kHalfVolume));

  const DynamicState s = random_dynamic(16, 1e-2, 4);
  const double z = apriori_Z(s);
  DynamicState doubled = s;
  doubled.w *= 2.0;
  doubled.v *= 2.0;
  doubled.phi *= 2.0;
  CHECK(apriori_Z(doubled) == doctest::Approx(4 * z).epsilon(1e-13));
  // (1 + |k|^2)^3 lies between 1 + |k|^2 + |k|^4 + |k|^6 and three times it.
  const double zd = apriori_Z_derivatives(s);
  CHECK(zd <= z * (1 + 1e-12));
  CHECK(z <= 3 * zd * (1 + 1e-12));

  for (std::uint64_t seed = 1; seed <= 3; ++seed) CHECK(apriori_E(random_dynamic(16, 1e-2, seed), m) > 0.0);

  // The R-term is cubic in the data while E itself is quadratic.
  std::vector<double> amps{1e-1, 1e-2, 1e-3}, corr;
  for (double a : amps) corr.push_back(std::abs(apriori_E_terms(smooth_state(g, a), m).correction));
  CHECK(std::abs(loglog_slope(amps, corr) - 3.0) < 0.2);
}

TEST_CASE("Xi accumulator") {
  const GridPtr g = Grid::create(16);
  XiAccumulator empty;
  QuasiState zero = QuasiState::zero(g);
  empty.add(zero);
  zero.t = 1.0;
  empty.add(zero);
  CHECK(empty.value() == 0.0);

  // phi = sin x: ||phi||_H2^2 = 4 c, ||grad phi||_H2^2 = 4 c with c = ||sin x||^2.
  QuasiState s = QuasiState::zero(g);
  s.phi = scalar_from_function(g, [](double x, double, double) { return std::sin(x); });
  XiAccumulator xi;
  xi.add(s);
  const double v0 = xi.value();
  s.t = 0.5;
  xi.add(s);
  CHECK(xi.sup_part() == doctest::Approx(4 * kHalfVolume));
  CHECK(xi.integral_part() == doctest::Approx(0.5 * 4 * kHalfVolume));
  CHECK(xi.value() >= v0);
  CHECK(xi.samples() == 2);
  s.phi *= 0.5;
  s.t = 1.0;
  xi.add(s);
  CHECK(xi.sup_part() == doctest::Approx(4 * kHalfVolume));
  CHECK(xi.value() > 6 * kHalfVolume);
}

TEST_CASE("twin divergence and invariants") {
  const GridPtr g = Grid::create(16);
  const DynamicState s = random_dynamic(16, 1e-2, 2);
  CHECK(twin_divergence(s.phi, s.w, s.phi, s.w) == 0.0);
  std::mt19937_64 rng(1);
  ScalarField eta = random_band_field<1>(g, 2, rng, false);
  eta *= 1.0 / l2_norm(eta);
  ScalarField p = s.phi;
  p.axpy(1e-3, eta);
  CHECK(twin_divergence(s.phi, s.w, p, s.w) == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK_THROWS_AS(twin_divergence(s.phi, s.w, ScalarField(Grid::create(8)), s.w), GridMismatch);

  const Invariants eq = invariants_snapshot(DynamicState::zero(g));
  CHECK(eq.mean_phi == 0.0);
  CHECK(eq.mean_v == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(eq.min_det == doctest::Approx(1.0));

  // d/dx(-1.5 sin x) = -1.5 at x = 0, so det(I + grad w) = -0.5 there.
  QuasiState bad = QuasiState::zero(g);
  bad.w = field_from_function<3>(g, [](double x, double, double) {
    return std::array<double, 3>{-1.5 * std::sin(x), 0.0, 0.0};
  });
  const Invariants inv = invariants_snapshot(bad);
  CHECK(inv.min_det == doctest::Approx(-0.5));
  CHECK(inv.min_det < 0.0);
}

TEST_CASE("a-priori bound multiple is stable under halving the data") {
  std::vector<double> multiples;
  for (double amp : {1e-2, 5e-3}) {
    RunConfig c;
    c.grid.n = 16;
    c.data.amplitude = amp;
    c.scheme.dt = 2e-3;
    c.scheme.T_end = 0.5;
    c.io.stride = 10;
    c.io.apriori_stride = 0;
    const DynamicState s0 = build_dynamic_initial(c);
    const DynamicRun run = simulate_dynamic(c, s0, true);
    REQUIRE(run.summary.ok);
    double sup_z = 0.0;
    for (const auto& r : run.records) sup_z = std::max(sup_z, *r.Z_big);
    const double T = c.scheme.T_end;
    const double bound = *run.records.front().E_big +
                         T * T * energy_E0_unnormalized(run.records.front().E0) +
                         std::pow(l2_norm(s0.w), 2);
    multiples.push_back(sup_z / bound);
  }
  CHECK(multiples[1] / multiples[0] < 2.0);
  CHECK(multiples[1] / multiples[0] > 0.5);
}
