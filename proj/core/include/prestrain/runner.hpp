#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prestrain/config.hpp"
#include "prestrain/diagnostics.hpp"
#include "prestrain/dynamic_solver.hpp"
#include "prestrain/quasistatic_solver.hpp"

namespace prestrain {

const char* version();

struct DynamicRun {
  DynamicRunSummary summary;
  std::vector<DiagnosticsRecord> records;
};

/// Integrates config.scheme from initial, recording every io.stride steps.
/// E_big is attached to every io.apriori_stride-th record (only the first
/// when apriori_stride is 0, none when with_apriori is false).
DynamicRun simulate_dynamic(const RunConfig& config, const DynamicState& initial,
                            bool with_apriori = true);

struct PicardRow {
  std::size_t step = 0;
  double t = 0.0;
  int iterations = 0;
  double contraction = 0.0;
  double last_distance = 0.0;
  int newton_iterations = 0;
};

struct QuasiRun {
  QuasiState final_state;
  std::size_t steps = 0;
  bool ok = true;
  std::string error;
  double failure_time = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<PicardRow> picard;  // row 0 is the equilibration at t = 0
  std::vector<double> phi_l2;     // ||phi||_L2 after every step, starting at t = 0
  XiAccumulator xi;
  double regularity_ratio = 0.0;      // at t = 0, after equilibration
  double max_regularity_ratio = 0.0;  // over the records
};

/// Equilibrates w at t = 0, then advances phi to scheme.T_end with step scheme.dt.
QuasiRun simulate_quasistatic(const RunConfig& config, const QuasiState& initial);

struct TwinRecord {
  double t = 0.0;
  double divergence = 0.0;
};

struct TwinRun {
  DynamicRunSummary base;
  DynamicRunSummary perturbed;
  std::vector<TwinRecord> records;
  double sup_divergence = 0.0;
};

/// Runs initial and initial + delta * direction (on phi) side by side.
TwinRun simulate_twin(const RunConfig& config, const DynamicState& initial,
                      const ScalarField& direction, double delta);

/// sqrt(||dw||_H1^2 + ||dv||^2 + ||dphi||^2)
double state_distance(const DynamicState& a, const DynamicState& b);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_picard_csv(std::ostream& out, const std::vector<PicardRow>& rows);
void write_twin_csv(std::ostream& out, const std::vector<TwinRecord>& rows);

/// Contents of manifest.json.
struct Manifest {
  std::string command;
  std::string status = "ok";
  int exit_code = 0;
  std::string error;
  std::optional<double> failure_time;
  double wall_seconds = 0.0;
  std::vector<std::string> files;
  /// Scalar results of the run, written under "results".
  std::vector<std::pair<std::string, double>> results;
};

/// Writes manifest.json (with the effective configuration and library
/// versions) and config.txt into dir.
void write_manifest(const std::string& dir, const RunConfig& config, const Manifest& manifest);

/// Creates dir (and parents) if needed.
void ensure_directory(const std::string& dir);

}  // namespace prestrain
