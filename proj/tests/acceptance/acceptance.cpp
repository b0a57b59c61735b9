// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "prestrain/certification.hpp"
#include "prestrain/config.hpp"
#include "prestrain/diagnostics.hpp"
#include "prestrain/initial_data.hpp"
#include "prestrain/quasistatic_solver.hpp"
#include "prestrain/runner.hpp"
#include "prestrain/spectral.hpp"

using namespace prestrain;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig dynamic_base() {
  RunConfig cfg;
  cfg.grid.n = 32;
  cfg.data.amplitude = 1e-2;
  cfg.data.mean_zero_phi = false;
  cfg.data.mean_zero_v = false;
  cfg.scheme.T_end = 1.0;
  cfg.io.stride = 1;
  cfg.io.apriori_stride = 0;
  return cfg;
}

struct LadderRun {
  double dt;
  DynamicRun run;
  double wall;
};

LadderRun run_at(RunConfig cfg, double dt, const DynamicState& initial, bool apriori) {
  cfg.scheme.dt = dt;
  const auto start = Clock::now();
  LadderRun r{dt, simulate_dynamic(cfg, initial, apriori), 0.0};
  r.wall = seconds(start);
  return r;
}

double relative_drift(double start, double end, double scale) {
  return std::abs(end - start) / std::max(std::abs(start), scale);
}

/// sup_t Z / (E(0) + T^2 (2 E0(0)) + ||u0 - id||^2)
double theorem_ratio(const DynamicRun& run, const DynamicState& initial, double T) {
  double sup_z = 0.0;
  for (const auto& r : run.records) sup_z = std::max(sup_z, r.Z_big.value_or(0.0));
  const double w0 = l2_norm(initial.w);
  const DiagnosticsRecord& first = run.records.front();
  return sup_z / (first.E_big.value() + T * T * energy_E0_unnormalized(first.E0) + w0 * w0);
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();

  // ---- dynamic runs shared by criteria 1, 2, 6, 7 and 9
  const RunConfig base = dynamic_base();
  const DynamicState initial = build_dynamic_initial(base);
  std::vector<LadderRun> ladder;
  for (double dt : {4e-3, 2e-3, 1e-3}) ladder.push_back(run_at(base, dt, initial, dt == 1e-3));
  const LadderRun& fine = ladder[2];
  const LadderRun& mid = ladder[1];

  // 1. energy law at dt = 1e-3 and first-order convergence under halving
  {
    bool ok = true;
    std::vector<double> res;
    for (const auto& l : ladder) {
      ok = ok && l.run.summary.ok;
      res.push_back(energy_law_residual(l.run.records));
    }
    const double r1 = res[0] / res[1];
    const double r2 = res[1] / res[2];
    const double e0 = fine.run.records.front().E0;
    ok = ok && res[2] <= 1e-6 && r1 >= 1.8 && r2 >= 1.8 && fine.wall <= 120.0;
    report(1, ok,
           fmt("residual(dt=1e-3) = %.3e (%.2e of E0), ratios %.3f %.3f, run time %.1f s",
               res[2], res[2] / e0, r1, r2, fine.wall));
  }

  // 2. conservation of mean(phi) and mean(v) over 1e3 steps, both solvers
  {
    const DynamicState& end = fine.run.summary.final_state;
    double drift = relative_drift(initial.phi.mean(), end.phi.mean(),
                                  l2_norm(initial.phi) / std::sqrt(initial.phi.grid()->volume()));
    const double v_scale = l2_norm(initial.v) / std::sqrt(initial.v.grid()->volume());
    for (int d = 0; d < 3; ++d)
      drift = std::max(drift, relative_drift(initial.v.mean(d), end.v.mean(d), v_scale));
    const bool dyn_ok = fine.run.summary.ok && fine.run.summary.steps == 1000 && drift <= 1e-12;

    RunConfig q;
    q.grid.n = 16;
    q.data.amplitude = 1e-2;
    q.data.band = 2;
    q.scheme.dt = 1e-3;
    q.scheme.T_end = 1.0;
    q.io.stride = 1000;
    const QuasiState q0 = build_quasi_initial(q);
    const QuasiRun qr = simulate_quasistatic(q, q0);
    const double q_scale = l2_norm(q0.phi) / std::sqrt(q0.phi.grid()->volume());
    const double q_drift = relative_drift(q0.phi.mean(), qr.final_state.phi.mean(), q_scale);
    const bool quasi_ok = qr.ok && qr.steps == 1000 && q_drift <= 1e-12;
    report(2, dyn_ok && quasi_ok,
           fmt("dynamic drift %.2e over %zu steps; quasi-static drift %.2e over %zu steps (16^3)",
               drift, fine.run.summary.steps, q_drift, qr.steps));
  }

  // ---- quasi-static amplitude sweep shared by criteria 3, 4 and 8
  std::vector<double> amplitudes = {5e-2, 1e-2, 5e-3};
  std::vector<QuasiRun> sweep;
  std::vector<double> h2_norms;
  for (double a : amplitudes) {
    RunConfig q;
    q.data.amplitude = a;
    q.scheme.dt = 1e-2;
    q.scheme.T_end = 0.5;
    q.io.stride = 1;
    const QuasiState q0 = build_quasi_initial(q);
    h2_norms.push_back(sobolev_norm(q0.phi, 2));
    sweep.push_back(simulate_quasistatic(q, q0));
  }

  // 3. monotone decay of ||phi||_L2
  {
    bool ok = true;
    double worst_step = -1e300;
    double worst_sup = -1e300;
    for (const auto& r : sweep) {
      ok = ok && r.ok;
      const double phi0 = r.phi_l2.front();
      for (std::size_t i = 1; i < r.phi_l2.size(); ++i) {
        worst_step = std::max(worst_step, r.phi_l2[i] - r.phi_l2[i - 1]);
        worst_sup = std::max(worst_sup, r.phi_l2[i] * r.phi_l2[i] - phi0 * phi0);
      }
      ok = ok && worst_sup <= 1e-12 * phi0 * phi0;
    }
    ok = ok && worst_step <= 1e-10;
    report(3, ok, fmt("largest per-step change of ||phi||_L2 %.3e, sup_t int phi^2 - int phi0^2 = %.3e",
                      worst_step, worst_sup));
  }

  // 4. Xi scales quadratically with ||phi0||_H2
  {
    std::vector<double> xi;
    bool ok = true;
    for (const auto& r : sweep) {
      ok = ok && r.ok;
      xi.push_back(r.xi.value());
    }
    const double slope = loglog_slope(h2_norms, xi);
    ok = ok && std::abs(slope - 2.0) <= 0.2;
    report(4, ok, fmt("log-log slope of Xi vs ||phi0||_H2 = %.4f over amplitudes 5e-2, 1e-2, 5e-3",
                      slope));
  }

  // 5. coercivity constants and the CaseStudy reflection witness
  {
    ModelConfig m;
    m.base = BaseKind::W01;
    m.q = 2.0;
    m.M_B = Eigen::Matrix3d::Zero();
    const double gamma0 = coercivity_check(m.build()).gamma_estimate;
    m.M_B = 0.1 * Eigen::Matrix3d::Identity();
    const double gamma1 = coercivity_check(m.build()).gamma_estimate;
    m.base = BaseKind::W02;
    const double gamma2 = coercivity_check(m.build()).gamma_estimate;
    const AxiomReport ar = axiom_check(BaseDensity{BaseKind::CaseStudy, 2.0}, 1000, 7);
    const AxiomResult& iv = ar.axiom[3];
    Eigen::Matrix3d reflection = Eigen::Matrix3d::Identity();
    reflection(0, 0) = -1.0;
    const bool witness_ok = !iv.passed && iv.witness &&
                            (*iv.witness - reflection).norm() <= 1e-12 &&
                            std::abs(iv.witness_dist2 - 4.0) <= 1e-6;
    const bool ok =
        std::abs(gamma0 - 1.0) <= 1e-6 && std::abs(gamma1 - gamma2) <= 1e-8 && witness_ok;
    report(5, ok,
           fmt("gamma(M_B=0) = %.12f, |gamma(W1) - gamma(W2)| = %.2e, witness dist^2 = %.9f",
               gamma0, std::abs(gamma1 - gamma2), iv.witness_dist2));
  }

  // 6. Galerkin ladder in epsilon (dt = 2e-3, compared with the epsilon = 0 run)
  {
    bool ok = mid.run.summary.ok;
    std::vector<double> dist, res;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      RunConfig c = base;
      c.scheme.epsilon = eps;
      const LadderRun r = run_at(c, 2e-3, initial, false);
      ok = ok && r.run.summary.ok;
      dist.push_back(state_distance(r.run.summary.final_state, mid.run.summary.final_state));
      res.push_back(energy_law_residual(r.run.records, true));
    }
    const bool monotone = dist[0] > dist[1] && dist[1] > dist[2];
    const double worst = *std::max_element(res.begin(), res.end());
    ok = ok && monotone && worst <= 1e-6;
    report(6, ok,
           fmt("distances %.3e > %.3e > %.3e, worst E_eps residual %.3e", dist[0], dist[1], dist[2],
               worst));
  }

  // 7. twin divergence responds quadratically to delta
  {
    const ScalarField direction = twin_direction(base);
    std::vector<double> div;
    bool ok = mid.run.summary.ok;
    for (double delta : {1e-5, 1e-6}) {
      DynamicState perturbed = initial;
      perturbed.phi.axpy(delta, direction);
      RunConfig c = base;
      c.io.stride = 100;
      const LadderRun r = run_at(c, 2e-3, perturbed, false);
      ok = ok && r.run.summary.ok;
      const DynamicState& a = mid.run.summary.final_state;
      const DynamicState& b = r.run.summary.final_state;
      div.push_back(twin_divergence(a.phi, a.w, b.phi, b.w));
    }
    const double ratio = div[0] / div[1];
    ok = ok && std::abs(ratio - 100.0) <= 20.0;
    report(7, ok, fmt("divergence at T = 1: %.4e and %.4e, ratio %.3f", div[0], div[1], ratio));
  }

  // 8. manufactured elliptic solve and stable regularity ratio
  {
    RunConfig q;
    const GridPtr grid = make_grid(q);
    const DensityModel model = q.model.build();
    const LinearizedSymbols symbols = assemble_symbols(model, grid);
    std::mt19937_64 rng(11);
    VectorField w_star = random_band_field<3>(grid, 3, rng, false);
    const MatrixField H = gradient(w_star);
    MatrixField A_rhs(grid);
    for (std::size_t m = 0; m < grid->mode_count(); ++m)
      for (int p = 0; p < 9; ++p) {
        Complex acc = 0.0;
        for (int r = 0; r < 9; ++r) acc += symbols.C(p, r) * H.data(r)[m];
        A_rhs.data(p)[m] = acc;
      }
    const VectorField w = solve_linear_elliptic(symbols, A_rhs, ScalarField(grid));
    const double err = l2_norm(w - w_star) / l2_norm(w_star);

    double lo = 1e300, hi = 0.0;
    bool ok = err <= 1e-10;
    for (const auto& r : sweep) {
      ok = ok && r.ok;
      lo = std::min(lo, r.regularity_ratio);
      hi = std::max(hi, r.regularity_ratio);
    }
    ok = ok && hi <= 2.0 * lo;
    report(8, ok, fmt("manufactured relative error %.2e, regularity ratio in [%.6f, %.6f]", err, lo,
                      hi));
  }

  // 9. sup Z relative to the data functional, stable under halving the amplitude
  {
    RunConfig half = base;
    half.data.amplitude = 0.5 * base.data.amplitude;
    const DynamicState initial_half = build_dynamic_initial(half);
    const LadderRun r = run_at(half, 1e-3, initial_half, true);
    const double full_ratio = theorem_ratio(fine.run, initial, base.scheme.T_end);
    const double half_ratio = theorem_ratio(r.run, initial_half, half.scheme.T_end);
    const double spread = std::max(full_ratio, half_ratio) / std::min(full_ratio, half_ratio);
    const bool ok = fine.run.summary.ok && r.run.summary.ok && std::isfinite(full_ratio) &&
                    std::isfinite(half_ratio) && spread <= 2.0;
    report(9, ok, fmt("ratio %.6f at amplitude 1e-2, %.6f at 5e-3 (spread x%.4f)", full_ratio,
                      half_ratio, spread));
  }

  // 10. appendix inequality on sampled admissible parameters
  {
    const auto start = Clock::now();
    struct Case {
      double c;
      Eigen::Matrix3d M;
    };
    Eigen::Matrix3d aniso = Eigen::Matrix3d::Zero();
    aniso.diagonal() << 0.3, -0.2, 0.1;
    aniso(0, 1) = aniso(1, 0) = 0.05;
    const Case cases[] = {{0.2, 0.1 * Eigen::Matrix3d::Identity()}, {0.5, aniso}, {0.05, Eigen::Matrix3d::Zero()}};
    double worst = 1e300;
    bool ok = true;
    for (std::size_t i = 0; i < std::size(cases); ++i) {
      const AppendixReport ap = appendix_inequality_check(cases[i].c, cases[i].M, 100000, 100 + i);
      ok = ok && ap.criterion_holds && ap.samples == 100000;
      worst = std::min(worst, ap.sampled_min_margin);
    }
    const double wall = seconds(start);
    ok = ok && worst >= -1e-10 && wall <= 10.0;
    report(10, ok, fmt("min margin %.3e over 3 x 1e5 samples in %.2f s", worst, wall));
  }

  std::printf("acceptance: %d failure(s), total %.1f s\n", failures, seconds(suite_start));
  return failures == 0 ? 0 : 1;
}
