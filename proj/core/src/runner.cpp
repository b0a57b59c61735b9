#include "prestrain/runner.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "prestrain/material.hpp"
#include "prestrain/spectral.hpp"

#ifndef PRESTRAIN_LAB_VERSION
#define PRESTRAIN_LAB_VERSION "unknown"
#endif

namespace prestrain {

namespace {

std::size_t step_count(const SchemeConfig& scheme) {
  return static_cast<std::size_t>(std::llround(scheme.T_end / scheme.dt));
}

void append_number(std::ostream& out, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.write(buf, res.ptr - buf);
}

}  // namespace

const char* version() { return PRESTRAIN_LAB_VERSION; }

DynamicRun simulate_dynamic(const RunConfig& config, const DynamicState& initial,
                            bool with_apriori) {
  DynamicRun run;
  const DensityModel model = config.model.build();
  const DynamicConfig dc = config.scheme.dynamic();
  const auto every = static_cast<std::size_t>(config.io.apriori_stride);
  run.summary = run_dynamic(
      dc, model, initial, static_cast<std::size_t>(config.io.stride),
      [&](const DynamicState& s, const DynamicSolver& solver, std::size_t) {
        DiagnosticsRecord r = dynamic_record(s, solver.material(), dc.epsilon);
        const std::size_t index = run.records.size();
        const bool due = every == 0 ? index == 0 : index % every == 0;
        if (with_apriori && due) r.E_big = apriori_E(s, model);
        run.records.push_back(r);
      });
  return run;
}

QuasiRun simulate_quasistatic(const RunConfig& config, const QuasiState& initial) {
  QuasiRun run;
  const DensityModel model = config.model.build();
  const LinearizedSymbols symbols = assemble_symbols(model, initial.phi.grid());
  const QuasiConfig& qc = config.quasi;
  const double dt = config.scheme.dt;
  const std::size_t steps = step_count(config.scheme);
  const auto stride = static_cast<std::size_t>(config.io.stride);

  QuasiState& s = run.final_state;
  s = initial;

  auto polish = [&](PicardRow& row) {
    if (qc.newton_iters <= 0) return;
    NewtonStats ns;
    s = newton_refine(s, model, symbols, qc.newton_tol, qc.newton_iters, nullptr, &ns);
    row.newton_iterations = static_cast<int>(ns.cg_iterations.size());
  };
  auto record = [&](int picard_iters) {
    const MaterialFields m = evaluate_material(model, s.phi, s.w, kChemical | kEnergy);
    DiagnosticsRecord r = quasi_record(s, m);
    r.xi_running = run.xi.value();
    r.picard_iters = picard_iters;
    run.records.push_back(r);
    run.max_regularity_ratio = std::max(run.max_regularity_ratio, elliptic_regularity_ratio(s));
  };
  auto row_from = [](std::size_t n, double t, const PicardStats& ps) {
    PicardRow row;
    row.step = n;
    row.t = t;
    row.iterations = ps.iterations;
    row.contraction = ps.contraction;
    row.last_distance = ps.distances.empty() ? 0.0 : ps.distances.back();
    return row;
  };

  try {
    PicardStats ps;
    s = equilibrate(s, model, symbols, qc.picard_tol, qc.max_iter, &ps);
    PicardRow row = row_from(0, s.t, ps);
    polish(row);
    run.picard.push_back(row);
    run.regularity_ratio = elliptic_regularity_ratio(s);
    run.xi.add(s);
    run.phi_l2.push_back(l2_norm(s.phi));
    record(ps.iterations);

    for (std::size_t n = 1; n <= steps; ++n) {
      s = advance_quasistatic(s, dt, model, symbols, qc.picard_tol, qc.max_iter, &ps);
      row = row_from(n, s.t, ps);
      polish(row);
      run.picard.push_back(row);
      run.xi.add(s);
      run.phi_l2.push_back(l2_norm(s.phi));
      run.steps = n;
      if (n % stride == 0 || n == steps) record(ps.iterations);
    }
  } catch (const SolverError& e) {
    run.ok = false;
    run.error = e.what();
    run.failure_time = e.has_time() ? e.time() : s.t;
  }
  return run;
}

TwinRun simulate_twin(const RunConfig& config, const DynamicState& initial,
                      const ScalarField& direction, double delta) {
  TwinRun run;
  const DensityModel model = config.model.build();
  const DynamicConfig dc = config.scheme.dynamic();
  const GridPtr& grid = initial.w.grid();
  run.base.final_state = initial;
  run.perturbed.final_state = initial;
  run.perturbed.final_state.phi.axpy(delta, direction);
  DynamicRunSummary* runs[2] = {&run.base, &run.perturbed};

  DynamicSolver solvers[2] = {DynamicSolver(model, dc, grid), DynamicSolver(model, dc, grid)};
  const std::size_t steps = step_count(config.scheme);
  const auto stride = static_cast<std::size_t>(config.io.stride);
  auto observe = [&] {
    const DynamicState& a = run.base.final_state;
    const DynamicState& b = run.perturbed.final_state;
    const double d = twin_divergence(a.phi, a.w, b.phi, b.w);
    run.records.push_back({a.t, d});
    run.sup_divergence = std::max(run.sup_divergence, d);
  };

  double norm0[2] = {0.0, 0.0};
  for (int r = 0; r < 2; ++r) {
    try {
      solvers[r].prime(runs[r]->final_state);
      norm0[r] = solvers[r].state_norm(runs[r]->final_state);
    } catch (const SolverError& e) {
      runs[r]->ok = false;
      runs[r]->error = e.what();
      runs[r]->failure_time = runs[r]->final_state.t;
    }
  }
  if (!run.base.ok || !run.perturbed.ok) return run;
  observe();
  for (std::size_t n = 1; n <= steps; ++n) {
    for (int r = 0; r < 2; ++r) {
      DynamicState& s = runs[r]->final_state;
      try {
        solvers[r].step(s);
        const double norm = solvers[r].state_norm(s);
        if (!std::isfinite(norm) || norm > dc.growth_limit * norm0[r])
          throw UnstableStep("state norm grew from " + std::to_string(norm0[r]) + " to " +
                                 std::to_string(norm),
                             s.t);
        runs[r]->steps = n;
      } catch (const SolverError& e) {
        runs[r]->ok = false;
        runs[r]->error = e.what();
        runs[r]->failure_time = e.has_time() ? e.time() : s.t;
        return run;
      }
    }
    if (n % stride == 0 || n == steps) observe();
  }
  return run;
}

double state_distance(const DynamicState& a, const DynamicState& b) {
  const VectorField dw = a.w - b.w;
  const double w0 = l2_norm(dw);
  const double v = l2_norm(a.v - b.v);
  const double p = l2_norm(a.phi - b.phi);
  return std::sqrt(w0 * w0 + gradient_sobolev_norm_squared(dw, 0) + v * v + p * p);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need at least two matching points");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void write_picard_csv(std::ostream& out, const std::vector<PicardRow>& rows) {
  out << "step,t,iterations,contraction,last_distance,newton_iterations\n";
  for (const auto& r : rows) {
    out << r.step << ',';
    append_number(out, r.t);
    out << ',' << r.iterations << ',';
    append_number(out, r.contraction);
    out << ',';
    append_number(out, r.last_distance);
    out << ',' << r.newton_iterations << '\n';
  }
}

void write_twin_csv(std::ostream& out, const std::vector<TwinRecord>& rows) {
  out << "t,twin_divergence\n";
  for (const auto& r : rows) {
    append_number(out, r.t);
    out << ',';
    append_number(out, r.divergence);
    out << '\n';
  }
}

void ensure_directory(const std::string& dir) { std::filesystem::create_directories(dir); }

void write_manifest(const std::string& dir, const RunConfig& config, const Manifest& manifest) {
  ensure_directory(dir);
  const std::string text = config.to_text();
  {
    std::ofstream cfg(std::filesystem::path(dir) / "config.txt", std::ios::binary);
    cfg << text;
    if (!cfg) throw std::runtime_error("cannot write config.txt in " + dir);
  }

  nlohmann::ordered_json j;
  j["tool"] = "prestrain_lab";
  j["command"] = manifest.command;
  j["status"] = manifest.status;
  j["exit_code"] = manifest.exit_code;
  if (!manifest.error.empty()) j["error"] = manifest.error;
  if (manifest.failure_time) j["failure_time"] = *manifest.failure_time;
  j["wall_seconds"] = manifest.wall_seconds;
  j["versions"] = {
      {"prestrain_lab", std::string(version())},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"fftw", std::string(fftw_version)},
  };

  // Flat echo of the effective configuration, keyed "section.key".
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  std::istringstream lines(text);
  std::string line, section;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    echo[section + "." + line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = echo;
  j["config_file"] = "config.txt";
  j["files"] = manifest.files;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.results) results[key] = value;
  j["results"] = results;

  std::ofstream out(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json in " + dir);
}

}  // namespace prestrain
