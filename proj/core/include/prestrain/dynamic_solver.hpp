#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "prestrain/density.hpp"
#include "prestrain/material.hpp"
#include "prestrain/state.hpp"

namespace prestrain {

struct DynamicConfig {
  double dt = 1e-3;
  double epsilon = 0.0;
  std::optional<int> n_galerkin;
  /// Implicit diffusion coefficient; defaults to d^2W/dphi^2 at (0, I).
  std::optional<double> a_split;
  double cfl_safety = 0.5;
  double t_end = 1.0;
  /// UnstableStep once the state norm exceeds growth_limit times its initial value.
  double growth_limit = 1e3;
};

/// Velocity-Verlet for (w, v) with an IMEX update for phi: the diffusion
/// a_split * Laplace(phi) is implicit, the remainder explicit.
class DynamicSolver {
 public:
  DynamicSolver(const DensityModel& model, const DynamicConfig& config, const GridPtr& grid);

  const DynamicConfig& config() const { return config_; }
  const DensityModel& model() const { return model_; }
  double a_split() const { return a_split_; }

  /// div dW/dF(phi, I + grad w) + epsilon Laplace(w)
  VectorField momentum_rhs(const DynamicState& s) const;
  /// Laplace(dW/dphi(phi, I + grad w))
  ScalarField diffusion_rhs(const DynamicState& s) const;
  double stable_dt(const DynamicState& s) const;
  /// Wave speed bound sqrt(max_n lambda_max(A(n))) for the Hessian at (phi, F).
  double wave_speed(double phi, const Eigen::Matrix3d& F) const;

  /// Advances s by one step of size config().dt.
  void step(DynamicState& s);

  /// Material response at the state reached by the last step (or by prime()).
  const MaterialFields& material() const { return material_; }
  /// Evaluates and caches the response at s (done lazily by step()).
  void prime(const DynamicState& s);

  double state_norm(const DynamicState& s) const;

 private:
  VectorField force_from(const MaterialFields& m, const VectorField& w) const;
  void truncate(VectorField& f) const;
  void truncate(ScalarField& f) const;
  double stable_dt_from(const MaterialFields& m) const;

  DensityModel model_;
  DynamicConfig config_;
  GridPtr grid_;
  double a_split_;
  std::vector<Eigen::Vector3d> directions_;
  double c2_equilibrium_;
  MaterialFields material_;
  VectorField force_;
  bool primed_ = false;
  double primed_t_ = 0.0;
};

struct DiagnosticsRecord;

struct DynamicRunSummary {
  DynamicState final_state;
  std::size_t steps = 0;
  bool ok = true;
  std::string error;
  double failure_time = 0.0;
};

/// Called with every state at the record stride (and the initial state).
using DynamicObserver =
    std::function<void(const DynamicState&, const DynamicSolver&, std::size_t step)>;

/// Integrates to t_end. Solver errors are caught, stamped with the failing
/// time and reported in the summary.
DynamicRunSummary run_dynamic(const DynamicConfig& config, const DensityModel& model,
                              const DynamicState& initial, std::size_t stride,
                              const DynamicObserver& observer);

}  // namespace prestrain
