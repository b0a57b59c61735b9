#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prestrain/density.hpp"
#include "prestrain/material.hpp"
#include "prestrain/state.hpp"

namespace prestrain {

/// One row of diagnostics.csv. Optional entries are written as empty cells.
struct DiagnosticsRecord {
  double t = 0.0;
  double E0 = 0.0;
  double dissipation = 0.0;
  std::optional<double> E_big;
  std::optional<double> Z_big;
  std::optional<double> E_eps;
  std::optional<double> xi_running;
  double mean_phi = 0.0;
  std::array<double, 3> mean_v{};
  double min_det_grad_u = 1.0;
  std::optional<int> picard_iters;
};

std::string csv_header();
/// Shortest round-trip formatting, so equal records give equal bytes.
std::string csv_row(const DiagnosticsRecord& r);
void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);
/// Inverse of write_csv; throws ParseError on a malformed file.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);

/// Integral of 1/2 |v|^2 + W(phi, I + grad w).
double energy_E0(const DynamicState& s, const DensityModel& model);
/// Integral of W(phi, I + grad w).
double energy_E0(const QuasiState& s, const DensityModel& model);
/// Integral of 1/2 |v|^2 (exact for band-limited v).
double kinetic_energy(const VectorField& v);
/// The unnormalized variant  integral |u_t|^2 + 2 W.
inline double energy_E0_unnormalized(double E0) { return 2.0 * E0; }

struct DissipationPaths {
  /// ||grad (-Laplace)^{-1} phi_t||^2 with phi_t = Laplace(mu)
  double through_inverse = 0.0;
  /// ||grad (mu - mean mu)||^2
  double direct = 0.0;
};

/// Both paths from the dealiased chemical potential mu = dW/dphi.
DissipationPaths dissipation_paths(const ScalarField& chemical);
/// The direct path, after checking the paths agree to 1e-10 (std::logic_error otherwise).
double dissipation_rate(const ScalarField& chemical);
double dissipation_rate(const DynamicState& s, const DensityModel& model);

/// max_t |E(t) + int_0^t dissipation - E(0)| with trapezoid quadrature over
/// the records. With use_eps the E_eps column replaces E0 (it must be present).
double energy_law_residual(const std::vector<DiagnosticsRecord>& records, bool use_eps = false);

/// Modified energy of the viscous variant: E0 + epsilon/2 ||grad w||^2.
double energy_E_eps(double E0, const VectorField& w, double epsilon);

/// Sorted index triples i <= j <= k and the number of orderings of each.
struct Triple {
  int i, j, k;
  int multiplicity;
};
const std::array<Triple, 10>& sorted_triples();

/// Correction fields R_ijk for the ten sorted triples: the part of
/// d_i d_j d_k [dW/dphi(phi, grad u)] that does not involve third
/// derivatives of the state. Zero at the equilibrium.
std::array<ScalarField, 10> correction_R(const ScalarField& phi, const VectorField& w,
                                         const DensityModel& model);
ScalarField correction_R(const ScalarField& phi, const VectorField& w, const DensityModel& model,
                         int i, int j, int k);

/// Summands of the a-priori energy E(t).
struct AprioriEnergy {
  double kinetic = 0.0;      // ||v||^2
  double kinetic3 = 0.0;     // ||grad^3 v||^2
  double elastic = 0.0;      // 2 int W
  double hessian = 0.0;      // sum_ijk D^2W : (phi_ijk, grad u_ijk)^{x2}
  double correction = 0.0;   // 2 sum_ijk int R_ijk phi_ijk
  double total() const { return kinetic + kinetic3 + elastic + hessian + correction; }
};

AprioriEnergy apriori_E_terms(const DynamicState& s, const DensityModel& model);
inline double apriori_E(const DynamicState& s, const DensityModel& model) {
  return apriori_E_terms(s, model).total();
}

/// ||v||_H3^2 + ||grad w||_H3^2 + ||phi||_H3^2 with Fourier weights.
double apriori_Z(const DynamicState& s);
/// Same quantity as a sum of L2 norms of all partial derivatives up to order 3.
double apriori_Z_derivatives(const DynamicState& s);

/// Running value of sup_t (||phi||_H2^2 + ||grad w||_H2^2)
/// + int_0^t (||grad phi||_H2^2 + ||grad^2 w||_H2^2) dt (trapezoid).
class XiAccumulator {
 public:
  void add(const QuasiState& s);
  double value() const { return sup_ + integral_; }
  double sup_part() const { return sup_; }
  double integral_part() const { return integral_; }
  std::size_t samples() const { return samples_; }

 private:
  double sup_ = 0.0;
  double integral_ = 0.0;
  double last_t_ = 0.0;
  double last_rate_ = 0.0;
  std::size_t samples_ = 0;
};

/// ||phi_A - phi_B||^2 + ||grad w_A - grad w_B||^2
double twin_divergence(const ScalarField& phi_a, const VectorField& w_a, const ScalarField& phi_b,
                       const VectorField& w_b);

struct Invariants {
  double mean_phi = 0.0;
  std::array<double, 3> mean_v{};
  double min_det = 1.0;
};

Invariants invariants_snapshot(const DynamicState& s);
Invariants invariants_snapshot(const QuasiState& s);

/// ||grad^2 w||_H1 / ||grad phi||_H1 (0 for phi = 0).
double elliptic_regularity_ratio(const QuasiState& s);

/// Record of a dynamic state; material must be the response at s.
DiagnosticsRecord dynamic_record(const DynamicState& s, const MaterialFields& material,
                                 double epsilon);
/// Record of a quasi-static state; material must be the response at s.
DiagnosticsRecord quasi_record(const QuasiState& s, const MaterialFields& material);

}  // namespace prestrain
