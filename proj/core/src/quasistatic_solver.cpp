#include "prestrain/quasistatic_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <string>

#include "prestrain/material.hpp"
#include "prestrain/spectral.hpp"

namespace prestrain {

namespace {

const Complex kI(0.0, 1.0);

Eigen::Vector3cd mode_vector(const VectorField& f, std::size_t m) {
  return {f.data(0)[m], f.data(1)[m], f.data(2)[m]};
}

Eigen::Vector3d wavevector(const Grid& g, std::size_t m) {
  return {g.wavenumber(0, m), g.wavenumber(1, m), g.wavenumber(2, m)};
}

void check_symbols(const LinearizedSymbols& symbols, const GridPtr& grid) {
  if (!symbols.grid || !grid || !symbols.grid->same_as(*grid)) throw GridMismatch();
}

// Per-mode exponential-Euler factors for phi' = -rate phi + f.
void phi_factors(double rate, double dt, double& decay, double& gain) {
  if (rate == 0.0) {
    decay = 1.0;
    gain = dt;
    return;
  }
  decay = std::exp(-rate * dt);
  gain = -std::expm1(-rate * dt) / rate;
}

}  // namespace

LinearizedSymbols assemble_symbols(const DensityModel& model, const GridPtr& grid) {
  const DerivativeStack d = derivatives(model, 0.0, Eigen::Matrix3d::Identity(), 2);
  const Eigen::Matrix<double, 10, 10> H = d.hessian();
  LinearizedSymbols s;
  s.grid = grid;
  s.C = stiffness_block(H);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.G(i, j) = H(0, 1 + 3 * i + j);
  s.a = H(0, 0);

  const Grid& g = *grid;
  const std::size_t modes = g.mode_count();
  s.A_inverse.assign(modes, Eigen::Matrix3d::Zero());
  s.Gk.assign(modes, Eigen::Vector3d::Zero());
  s.rate.assign(modes, 0.0);
  s.min_acoustic_eigenvalue = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (std::size_t m = 0; m < modes; ++m) {
    if (!g.retained(m) || g.k_squared(m) == 0.0) continue;
    const Eigen::Vector3d k = wavevector(g, m);
    const Eigen::Matrix3d A = acoustic_matrix(s.C, k);
    solver.computeDirect(A, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues()(0);
    if (!(lo > 0.0)) throw NotElliptic(lo, g.index(0, m), g.index(1, m), g.index(2, m));
    // Relative to |k|^2 so the bound is comparable across modes.
    s.min_acoustic_eigenvalue = std::min(s.min_acoustic_eigenvalue, lo / g.k_squared(m));
    s.A_inverse[m] = A.inverse();
    s.Gk[m] = s.G * k;
    s.rate[m] = g.k_squared(m) * (s.a - s.Gk[m].dot(s.A_inverse[m] * s.Gk[m]));
  }
  return s;
}

VectorField solve_linear_elliptic(const LinearizedSymbols& symbols, const MatrixField& A_rhs,
                                  const ScalarField& phi) {
  check_symbols(symbols, A_rhs.grid());
  check_symbols(symbols, phi.grid());
  const Grid& g = *symbols.grid;
  VectorField w(symbols.grid);
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (!g.retained(m) || g.k_squared(m) == 0.0) continue;
    const Eigen::Vector3d k = wavevector(g, m);
    Eigen::Vector3cd Ak;
    for (int i = 0; i < 3; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += A_rhs.data(3 * i + j)[m] * k(j);
      Ak(i) = acc;
    }
    const Eigen::Vector3cd rhs = kI * (symbols.Gk[m].cast<Complex>() * phi.data()[m] - Ak);
    const Eigen::Vector3cd sol = symbols.A_inverse[m].cast<Complex>() * rhs;
    for (int i = 0; i < 3; ++i) w.data(i)[m] = sol(i);
  }
  return w;
}

std::pair<MatrixField, ScalarField> residual_AB(const QuasiState& s, const DensityModel& model,
                                                const LinearizedSymbols& symbols) {
  check_symbols(symbols, s.w.grid());
  const MaterialFields mat = evaluate_material(model, s.phi, s.w, kStress | kChemical);
  const MatrixField H = gradient(s.w);
  const Grid& g = *symbols.grid;
  MatrixField A(symbols.grid);
  ScalarField B(symbols.grid);
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    const Complex ph = s.phi.data()[m];
    Complex gh = 0.0;
    for (int p = 0; p < 9; ++p) {
      Complex acc = 0.0;
      for (int q = 0; q < 9; ++q) acc += symbols.C(p, q) * H.data(q)[m];
      const double Gp = symbols.G(p / 3, p % 3);
      A.data(p)[m] = acc + Gp * ph - mat.stress.data(p)[m];
      gh += Gp * H.data(p)[m];
    }
    B.data()[m] = mat.chemical.data()[m] - symbols.a * ph - gh;
  }
  return {std::move(A), std::move(B)};
}

double elliptic_residual(const QuasiState& s, const DensityModel& model,
                         const VectorField* forcing) {
  const MaterialFields mat = evaluate_material(model, s.phi, s.w, kStress);
  VectorField r = divergence_rowwise(mat.stress);
  if (forcing) r -= *forcing;
  return l2_norm(r);
}

double picard_distance(const QuasiState& a, const QuasiState& b) {
  return sobolev_norm(a.phi - b.phi, 2) + std::sqrt(gradient_sobolev_norm_squared(a.w - b.w, 1));
}

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double picard_scale(const QuasiState& s) {
  return sobolev_norm(s.phi, 2) + std::sqrt(gradient_sobolev_norm_squared(s.w, 1));
}

template <class Update>
QuasiState picard_loop(const QuasiState& start, double picard_tol, int max_iter,
                       PicardStats* stats, const Update& update) {
  PicardStats local;
  PicardStats& st = stats ? *stats : local;
  st = PicardStats{};
  QuasiState iterate = start;
  for (int it = 1; it <= max_iter; ++it) {
    QuasiState next = update(iterate);
    const double d = picard_distance(next, iterate);
    st.iterations = it;
    st.distances.push_back(d);
    iterate = std::move(next);
    if (!std::isfinite(d)) throw NoContraction("Picard iterate is not finite");
    if (d <= picard_tol * picard_scale(iterate)) return iterate;
    if (it >= 2) {
      const double ratio = d / st.distances[it - 2];
      const double scale = picard_scale(iterate);
      // Ratios of distances near the rounding floor say nothing about contraction.
      if (st.distances[it - 2] > 1e3 * picard_tol * scale)
        st.contraction = std::max(st.contraction, ratio);
      if (it >= 3 && ratio >= 1.0) {
        // Stagnation just above the tolerance is the rounding floor, not divergence.
        if (d <= 100.0 * picard_tol * scale) return iterate;
        throw NoContraction("Picard distance grew from " + sci(st.distances[it - 2]) + " to " +
                            sci(d) + " (scale " + sci(scale) + ") at iteration " +
                            std::to_string(it));
      }
    }
  }
  throw NoContraction("Picard iteration did not converge in " + std::to_string(max_iter) +
                      " iterations (last distance " + sci(st.distances.back()) + ")");
}

}  // namespace

QuasiState advance_quasistatic(const QuasiState& s, double dt, const DensityModel& model,
                               const LinearizedSymbols& symbols, double picard_tol, int max_iter,
                               PicardStats* stats) {
  check_symbols(symbols, s.phi.grid());
  const Grid& g = *symbols.grid;
  const std::size_t modes = g.mode_count();
  std::vector<double> decay(modes), gain(modes);
  for (std::size_t m = 0; m < modes; ++m) phi_factors(symbols.rate[m], dt, decay[m], gain[m]);

  try {
    QuasiState out = picard_loop(s, picard_tol, max_iter, stats, [&](const QuasiState& it) {
      auto [A, B] = residual_AB(it, model, symbols);
      QuasiState next;
      next.t = s.t + dt;
      next.phi = ScalarField(symbols.grid);
      Complex* p = next.phi.data();
      const Complex* p0 = s.phi.data();
      for (std::size_t m = 0; m < modes; ++m) {
        if (!g.retained(m)) continue;
        if (g.k_squared(m) == 0.0) {
          p[m] = p0[m];
          continue;
        }
        const Eigen::Vector3d k = wavevector(g, m);
        Eigen::Vector3cd Ak;
        for (int i = 0; i < 3; ++i) {
          Complex acc = 0.0;
          for (int j = 0; j < 3; ++j) acc += A.data(3 * i + j)[m] * k(j);
          Ak(i) = acc;
        }
        const Eigen::Vector3d y = symbols.A_inverse[m] * symbols.Gk[m];
        const Complex coupling = y(0) * Ak(0) + y(1) * Ak(1) + y(2) * Ak(2);
        const Complex f = -g.k_squared(m) * (coupling + B.data()[m]);
        p[m] = decay[m] * p0[m] + gain[m] * f;
      }
      next.w = solve_linear_elliptic(symbols, A, next.phi);
      return next;
    });
    return out;
  } catch (SolverError& e) {
    if (!e.has_time()) e.set_time(s.t);
    throw;
  }
}

QuasiState equilibrate(const QuasiState& s, const DensityModel& model,
                       const LinearizedSymbols& symbols, double picard_tol, int max_iter,
                       PicardStats* stats) {
  try {
    return picard_loop(s, picard_tol, max_iter, stats, [&](const QuasiState& it) {
      auto [A, B] = residual_AB(it, model, symbols);
      QuasiState next;
      next.t = s.t;
      next.phi = s.phi;
      next.w = solve_linear_elliptic(symbols, A, s.phi);
      return next;
    });
  } catch (SolverError& e) {
    if (!e.has_time()) e.set_time(s.t);
    throw;
  }
}

namespace {

VectorField precondition(const LinearizedSymbols& symbols, const VectorField& r) {
  const Grid& g = *symbols.grid;
  VectorField z(symbols.grid);
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (!g.retained(m) || g.k_squared(m) == 0.0) continue;
    const Eigen::Vector3cd v = symbols.A_inverse[m].cast<Complex>() * mode_vector(r, m);
    for (int i = 0; i < 3; ++i) z.data(i)[m] = v(i);
  }
  return z;
}

}  // namespace

QuasiState newton_refine(const QuasiState& s, const DensityModel& model,
                         const LinearizedSymbols& symbols, double tol, int max_iter,
                         const VectorField* forcing, NewtonStats* stats) {
  check_symbols(symbols, s.w.grid());
  NewtonStats local;
  NewtonStats& st = stats ? *stats : local;
  st = NewtonStats{};

  auto residual_field = [&](const QuasiState& q) {
    VectorField r = divergence_rowwise(evaluate_material(model, q.phi, q.w, kStress).stress);
    if (forcing) r -= *forcing;
    return r;
  };
  // K d = -div(dP[grad d]) is symmetric positive definite near equilibrium.
  auto apply_K = [&](const QuasiState& q, const VectorField& d) {
    VectorField out = divergence_rowwise(stress_directional(model, q.phi, q.w, d));
    out *= -1.0;
    return out;
  };

  QuasiState x = s;
  try {
    VectorField F = residual_field(x);
    double res = l2_norm(F);
    const double res0 = res;
    st.residuals.push_back(res);
    for (int it = 0; it < max_iter && res > tol; ++it) {
      // Solve K d = F by preconditioned conjugate gradients.
      VectorField d(x.w.grid());
      VectorField r = F;
      VectorField z = precondition(symbols, r);
      VectorField p = z;
      double rz = inner_product(r, z);
      const double r0 = l2_norm(r);
      int cg = 0;
      for (; cg < 200 && l2_norm(r) > 1e-12 * r0; ++cg) {
        const VectorField Kp = apply_K(x, p);
        const double pKp = inner_product(p, Kp);
        if (!(pKp > 0.0)) throw NewtonDiverged("Jacobian is not positive definite");
        const double alpha = rz / pKp;
        d.axpy(alpha, p);
        r.axpy(-alpha, Kp);
        z = precondition(symbols, r);
        const double rz_next = inner_product(r, z);
        p *= rz_next / rz;
        p += z;
        rz = rz_next;
      }
      st.cg_iterations.push_back(cg);
      x.w += d;
      F = residual_field(x);
      res = l2_norm(F);
      st.residuals.push_back(res);
      if (!std::isfinite(res) || res > 1e3 * std::max(res0, tol))
        throw NewtonDiverged("Newton residual grew to " + std::to_string(res));
    }
    if (res > tol && max_iter > 0 && st.residuals.size() > 1 && res >= st.residuals.front())
      throw NewtonDiverged("Newton iteration made no progress (residual " + std::to_string(res) +
                           ")");
  } catch (SolverError& e) {
    if (!e.has_time()) e.set_time(s.t);
    throw;
  }
  return x;
}

}  // namespace prestrain
