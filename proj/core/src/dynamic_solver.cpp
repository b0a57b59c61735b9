#include "prestrain/dynamic_solver.hpp"

#include <cmath>
#include <string>

#include "prestrain/acoustic.hpp"
#include "prestrain/spectral.hpp"

namespace prestrain {

DynamicSolver::DynamicSolver(const DensityModel& model, const DynamicConfig& config,
                             const GridPtr& grid)
    : model_(model), config_(config), grid_(grid) {
  model_.validate();
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (config.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  const DerivativeStack eq = derivatives(model_, 0.0, Eigen::Matrix3d::Identity(), 2);
  a_split_ = config.a_split.value_or(eq.second(0, 0));
  directions_ = retained_directions(*grid_);
  c2_equilibrium_ = max_wave_speed_squared(stiffness_block(eq.hessian()), directions_);
}

void DynamicSolver::truncate(VectorField& f) const {
  if (config_.n_galerkin) f = truncate_modes(f, *config_.n_galerkin);
}

void DynamicSolver::truncate(ScalarField& f) const {
  if (config_.n_galerkin) f = truncate_modes(f, *config_.n_galerkin);
}

VectorField DynamicSolver::force_from(const MaterialFields& m, const VectorField& w) const {
  VectorField f = divergence_rowwise(m.stress);
  if (config_.epsilon != 0.0) f.axpy(config_.epsilon, laplacian(w));
  truncate(f);
  return f;
}

VectorField DynamicSolver::momentum_rhs(const DynamicState& s) const {
  return force_from(evaluate_material(model_, s.phi, s.w, kStress), s.w);
}

ScalarField DynamicSolver::diffusion_rhs(const DynamicState& s) const {
  return laplacian(evaluate_material(model_, s.phi, s.w, kChemical).chemical);
}

double DynamicSolver::wave_speed(double phi, const Eigen::Matrix3d& F) const {
  const DerivativeStack d = derivatives(model_, phi, F, 2);
  return std::sqrt(max_wave_speed_squared(stiffness_block(d.hessian()), directions_));
}

double DynamicSolver::stable_dt_from(const MaterialFields& m) const {
  double c2 = c2_equilibrium_;
  if (m.max_deviation > 0.0) {
    const double c = wave_speed(m.stiff_phi, m.stiff_F);
    c2 = std::max(c2, c * c);
  }
  c2 += config_.epsilon;  // epsilon Laplace(w) stiffens every direction
  return grid_->spacing() / std::sqrt(c2);
}

double DynamicSolver::stable_dt(const DynamicState& s) const {
  return stable_dt_from(evaluate_material(model_, s.phi, s.w, kEnergy));
}

double DynamicSolver::state_norm(const DynamicState& s) const {
  const double a = gradient_sobolev_norm_squared(s.w, 0);
  const double b = std::pow(l2_norm(s.v), 2);
  const double c = std::pow(l2_norm(s.phi), 2);
  return std::sqrt(a + b + c);
}

void DynamicSolver::prime(const DynamicState& s) {
  material_ = evaluate_material(model_, s.phi, s.w, kAll);
  force_ = force_from(material_, s.w);
  primed_ = true;
  primed_t_ = s.t;
}

void DynamicSolver::step(DynamicState& s) {
  try {
    if (!primed_ || primed_t_ != s.t) prime(s);
    if (!(material_.min_det > 0.0)) throw OutOfDomain(material_.min_det);
    const double limit = config_.cfl_safety * stable_dt_from(material_);
    if (config_.dt > limit)
      throw UnstableStep("dt = " + std::to_string(config_.dt) +
                         " exceeds cfl_safety * stable_dt = " + std::to_string(limit));

    const double dt = config_.dt;
    s.v.axpy(0.5 * dt, force_);
    truncate(s.v);
    s.w.axpy(dt, s.v);
    truncate(s.w);

    const MaterialFields mid = evaluate_material(model_, s.phi, s.w, kChemical);
    const ScalarField rhs = laplacian(mid.chemical);
    const Grid& g = *grid_;
    Complex* p = s.phi.data();
    const Complex* r = rhs.data();
    for (std::size_t m = 0; m < g.mode_count(); ++m) {
      const double ak2 = a_split_ * g.k_squared(m);
      p[m] = (p[m] + dt * (r[m] + ak2 * p[m])) / (1.0 + dt * ak2);
    }
    truncate(s.phi);

    material_ = evaluate_material(model_, s.phi, s.w, kAll);
    force_ = force_from(material_, s.w);
    s.v.axpy(0.5 * dt, force_);
    truncate(s.v);
    s.t += dt;
    primed_t_ = s.t;
    if (!(material_.min_det > 0.0)) throw OutOfDomain(material_.min_det);
  } catch (SolverError& e) {
    primed_ = false;
    if (!e.has_time()) e.set_time(s.t);
    throw;
  } catch (...) {
    primed_ = false;
    throw;
  }
}

DynamicRunSummary run_dynamic(const DynamicConfig& config, const DensityModel& model,
                              const DynamicState& initial, std::size_t stride,
                              const DynamicObserver& observer) {
  if (stride == 0) stride = 1;
  DynamicRunSummary summary;
  summary.final_state = initial;
  DynamicState& s = summary.final_state;
  DynamicSolver solver(model, config, s.w.grid());
  const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
  try {
    solver.prime(s);
    const double norm0 = solver.state_norm(s);
    if (observer) observer(s, solver, 0);
    for (std::size_t n = 1; n <= steps; ++n) {
      solver.step(s);
      const double norm = solver.state_norm(s);
      if (!std::isfinite(norm) || norm > config.growth_limit * norm0)
        throw UnstableStep("state norm grew from " + std::to_string(norm0) + " to " +
                               std::to_string(norm),
                           s.t);
      summary.steps = n;
      if (observer && (n % stride == 0 || n == steps)) observer(s, solver, n);
    }
  } catch (const SolverError& e) {
    summary.ok = false;
    summary.error = e.what();
    summary.failure_time = e.has_time() ? e.time() : s.t;
  }
  return summary;
}

}  // namespace prestrain
