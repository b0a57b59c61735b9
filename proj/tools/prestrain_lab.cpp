// Command-line front end: simulate, quasistatic, twin, verify-density,
// convergence and galerkin-sweep.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prestrain/certification.hpp"
#include "prestrain/config.hpp"
#include "prestrain/diagnostics.hpp"
#include "prestrain/error.hpp"
#include "prestrain/initial_data.hpp"
#include "prestrain/parallel.hpp"
#include "prestrain/runner.hpp"
#include "prestrain/state.hpp"

namespace fs = std::filesystem;
using namespace prestrain;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> stride;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "configuration file (key = value)");
  cmd->add_option("--out", o.out, "output directory (overrides io.out_dir)");
  cmd->add_option("--stride", o.stride, "record every K steps (overrides io.stride)");
  cmd->add_option("--seed", o.seed, "initial-data seed (overrides data.seed)");
  cmd->add_option("--set", o.overrides, "extra key=value override, repeatable");
}

RunConfig load_config(const CommonOptions& o, RunMode mode) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : parse_config(o.config_path);
  std::vector<std::string> violations;
  auto apply = [&](const std::string& key, const std::string& value) {
    if (std::string msg = cfg.set(key, value); !msg.empty()) violations.push_back(msg);
  };
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      violations.push_back("--set " + kv + ": expected key=value");
      continue;
    }
    apply(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.out) cfg.io.out_dir = *o.out;
  if (o.stride) apply("io.stride", std::to_string(*o.stride));
  if (o.seed) cfg.data.seed = *o.seed;
  if (!violations.empty()) throw ValidationError(violations);
  cfg.validate(mode);
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  writer(out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void fail_manifest(Manifest& m, const std::string& error, std::optional<double> time) {
  m.status = "failed";
  m.exit_code = kExitSolver;
  m.error = error;
  m.failure_time = time;
}

int report_solver_failure(const std::string& error, double time) {
  std::fprintf(stderr, "solver failure at t = %.17g: %s\n", time, error.c_str());
  return kExitSolver;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config(o, RunMode::Dynamic);
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());

  const DynamicRun run = simulate_dynamic(cfg, build_dynamic_initial(cfg));
  Manifest m;
  m.command = "simulate";
  write_file(dir / "diagnostics.csv", [&](std::ostream& out) { write_csv(out, run.records); });
  m.files.push_back("diagnostics.csv");
  if (cfg.io.write_state) {
    save_state((dir / "final_state.bin").string(), run.summary.final_state);
    m.files.push_back("final_state.bin");
  }
  m.results = {{"steps", static_cast<double>(run.summary.steps)},
               {"energy_law_residual", energy_law_residual(run.records)},
               {"energy_law_residual_eps", energy_law_residual(run.records, true)}};
  if (!run.summary.ok) fail_manifest(m, run.summary.error, run.summary.failure_time);
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  if (!run.summary.ok) return report_solver_failure(run.summary.error, run.summary.failure_time);
  std::printf("simulate: %zu steps, energy law residual %.3e, output in %s\n", run.summary.steps,
              energy_law_residual(run.records), dir.string().c_str());
  return 0;
}

// ------------------------------------------------------------- quasistatic

int cmd_quasistatic(const CommonOptions& o, std::optional<double> picard_tol,
                    std::optional<int> max_iter) {
  const auto start = std::chrono::steady_clock::now();
  CommonOptions opts = o;
  if (picard_tol) {
    std::ostringstream s;
    s.precision(17);
    s << *picard_tol;
    opts.overrides.push_back("quasi.picard_tol=" + s.str());
  }
  if (max_iter) opts.overrides.push_back("quasi.max_iter=" + std::to_string(*max_iter));
  const RunConfig cfg = load_config(opts, RunMode::Quasistatic);
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());

  const QuasiRun run = simulate_quasistatic(cfg, build_quasi_initial(cfg));
  Manifest m;
  m.command = "quasistatic";
  write_file(dir / "diagnostics.csv", [&](std::ostream& out) { write_csv(out, run.records); });
  write_file(dir / "picard.csv", [&](std::ostream& out) { write_picard_csv(out, run.picard); });
  m.files = {"diagnostics.csv", "picard.csv"};
  if (cfg.io.write_state) {
    save_state((dir / "final_state.bin").string(), run.final_state);
    m.files.push_back("final_state.bin");
  }
  double max_increase = 0.0;
  for (std::size_t i = 1; i < run.phi_l2.size(); ++i)
    max_increase = std::max(max_increase, run.phi_l2[i] - run.phi_l2[i - 1]);
  m.results = {{"steps", static_cast<double>(run.steps)},
               {"xi", run.xi.value()},
               {"xi_sup_part", run.xi.sup_part()},
               {"xi_integral_part", run.xi.integral_part()},
               {"regularity_ratio", run.regularity_ratio},
               {"max_regularity_ratio", run.max_regularity_ratio},
               {"max_phi_l2_increase", max_increase}};
  if (!run.ok) fail_manifest(m, run.error, run.failure_time);
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  if (!run.ok) return report_solver_failure(run.error, run.failure_time);
  std::printf("quasistatic: %zu steps, Xi %.6e, output in %s\n", run.steps, run.xi.value(),
              dir.string().c_str());
  return 0;
}

// -------------------------------------------------------------------- twin

int cmd_twin(const CommonOptions& o, double delta) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config(o, RunMode::Dynamic);
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());

  const TwinRun run = simulate_twin(cfg, build_dynamic_initial(cfg), twin_direction(cfg), delta);
  Manifest m;
  m.command = "twin";
  write_file(dir / "twin.csv", [&](std::ostream& out) { write_twin_csv(out, run.records); });
  m.files = {"twin.csv"};
  const double final_div = run.records.empty() ? 0.0 : run.records.back().divergence;
  m.results = {{"delta", delta},
               {"sup_divergence", run.sup_divergence},
               {"final_divergence", final_div}};
  const DynamicRunSummary& failed = run.base.ok ? run.perturbed : run.base;
  if (!failed.ok) fail_manifest(m, failed.error, failed.failure_time);
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  if (!failed.ok) return report_solver_failure(failed.error, failed.failure_time);
  std::printf("twin: delta %.3e, divergence at T %.6e (sup %.6e)\n", delta, final_div,
              run.sup_divergence);
  return 0;
}

// ---------------------------------------------------------- verify-density

std::vector<int> parse_axioms(const std::string& list) {
  std::vector<int> out;
  if (list.empty()) return out;
  if (list == "all") return {0, 1, 2, 3};
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    static const char* names[] = {"i", "ii", "iii", "iv"};
    int found = -1;
    for (int k = 0; k < 4; ++k)
      if (item == names[k] || item == std::to_string(k + 1)) found = k;
    if (found < 0) throw ValidationError({"--axioms: unknown axiom '" + item + "'"});
    out.push_back(found);
  }
  return out;
}

nlohmann::ordered_json matrix_json(const Eigen::Matrix3d& M) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({M(i, 0), M(i, 1), M(i, 2)});
  return rows;
}

int cmd_verify_density(const CommonOptions& o, const std::string& axioms, std::size_t samples,
                       std::optional<double> c) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config(o, RunMode::Dynamic);
  const std::vector<int> requested = parse_axioms(axioms);
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());

  const DensityModel model = cfg.model.build();
  bool pass = true;
  nlohmann::ordered_json report;
  Manifest m;
  m.command = "verify-density";

  const CoercivityReport coercivity = coercivity_check(model);
  report["coercivity"] = {{"gamma_estimate", coercivity.gamma_estimate},
                          {"pass", coercivity.pass},
                          {"spectrum", std::vector<double>(coercivity.spectrum.data(),
                                                           coercivity.spectrum.data() + 7)}};
  m.results.emplace_back("gamma_estimate", coercivity.gamma_estimate);
  pass = pass && coercivity.pass;
  std::printf("coercivity: gamma_estimate = %.12g (%s)\n", coercivity.gamma_estimate,
              coercivity.pass ? "pass" : "FAIL");

  if (!requested.empty()) {
    const AxiomReport ar = axiom_check(model.base, samples, cfg.data.seed);
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    static const char* names[] = {"i", "ii", "iii", "iv"};
    for (int k : requested) {
      const AxiomResult& r = ar.axiom[k];
      nlohmann::ordered_json a = {{"axiom", names[k]},
                                  {"passed", r.passed},
                                  {"measure", r.measure},
                                  {"detail", r.detail}};
      if (r.witness) {
        a["witness"] = matrix_json(*r.witness);
        a["witness_energy"] = r.witness_energy;
        a["witness_dist2"] = r.witness_dist2;
      }
      list.push_back(a);
      pass = pass && r.passed;
      std::printf("axiom (%s): %s  %s\n", names[k], r.passed ? "pass" : "FAIL", r.detail.c_str());
      if (r.witness) {
        const Eigen::Matrix3d& W = *r.witness;
        std::printf("  witness [[%g %g %g] [%g %g %g] [%g %g %g]], W0 = %g, dist^2 = %g\n",
                    W(0, 0), W(0, 1), W(0, 2), W(1, 0), W(1, 1), W(1, 2), W(2, 0), W(2, 1),
                    W(2, 2), r.witness_energy, r.witness_dist2);
      }
    }
    report["axioms"] = list;
  }

  if (c) {
    const AppendixReport ap = appendix_inequality_check(*c, cfg.model.M_B, samples, cfg.data.seed);
    report["appendix"] = {{"c", ap.c},
                          {"generator_norm", ap.generator_norm},
                          {"criterion_value", ap.criterion_value},
                          {"criterion_holds", ap.criterion_holds},
                          {"sampled_min_margin", ap.sampled_min_margin},
                          {"exact_min_margin", ap.exact_min_margin},
                          {"counterexample_found", ap.counterexample_found},
                          {"samples", ap.samples}};
    m.results.emplace_back("appendix_min_margin", ap.sampled_min_margin);
    const bool ok = !(ap.criterion_holds && ap.counterexample_found);
    pass = pass && ok;
    std::printf("appendix: criterion %s, sampled min margin %.6e, exact min margin %.6e\n",
                ap.criterion_holds ? "holds" : "fails", ap.sampled_min_margin,
                ap.exact_min_margin);
  }

  report["pass"] = pass;
  write_file(dir / "report.json", [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  m.files = {"report.json"};
  if (!pass) {
    m.status = "verification_failed";
    m.exit_code = kExitVerification;
  }
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  return pass ? 0 : kExitVerification;
}

// ------------------------------------------------------------- convergence

int cmd_convergence(const CommonOptions& o, int levels) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config(o, RunMode::Dynamic);
  if (levels < 2) throw ValidationError({"--levels must be >= 2"});
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());
  const DynamicState initial = build_dynamic_initial(cfg);

  std::vector<RunConfig> configs(levels, cfg);
  std::vector<DynamicRun> runs(levels);
  for (int l = 0; l < levels; ++l) {
    configs[l].scheme.dt = cfg.scheme.dt / std::pow(2.0, l);
    // Keep the record spacing in time fixed across levels.
    configs[l].io.stride = cfg.io.stride << l;
    configs[l].io.apriori_stride = 0;
    configs[l].io.out_dir = (dir / ("level_" + std::to_string(l))).string();
  }
  parallel_chunks(static_cast<std::size_t>(levels), [&](std::size_t l) {
    runs[l] = simulate_dynamic(configs[l], initial, false);
  });

  Manifest m;
  m.command = "convergence";
  std::ostringstream table;
  table << "level,dt,energy_law_residual,residual_ratio,self_error,self_error_ratio\n";
  std::vector<double> residual(levels), self_error(levels, std::nan(""));
  for (int l = 0; l < levels; ++l) {
    ensure_directory(configs[l].io.out_dir);
    write_file(fs::path(configs[l].io.out_dir) / "diagnostics.csv",
               [&](std::ostream& out) { write_csv(out, runs[l].records); });
    residual[l] = energy_law_residual(runs[l].records);
    if (l + 1 < levels)
      self_error[l] = state_distance(runs[l].summary.final_state, runs[l + 1].summary.final_state);
  }
  bool ok = true;
  for (int l = 0; l < levels; ++l) {
    ok = ok && runs[l].summary.ok;
    char row[256];
    const double rr = l > 0 ? residual[l - 1] / residual[l] : std::nan("");
    const double er = (l > 0 && l + 1 < levels) ? self_error[l - 1] / self_error[l] : std::nan("");
    std::snprintf(row, sizeof row, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", l, configs[l].scheme.dt,
                  residual[l], rr, self_error[l], er);
    table << row;
    m.results.emplace_back("residual_level_" + std::to_string(l), residual[l]);
    std::printf("level %d: dt %.3e residual %.3e ratio %.3f\n", l, configs[l].scheme.dt,
                residual[l], rr);
  }
  write_file(dir / "convergence.csv", [&](std::ostream& out) { out << table.str(); });
  m.files = {"convergence.csv"};
  for (int l = 0; l < levels; ++l) m.files.push_back("level_" + std::to_string(l) + "/diagnostics.csv");
  if (!ok) {
    for (const auto& r : runs)
      if (!r.summary.ok) {
        fail_manifest(m, r.summary.error, r.summary.failure_time);
        break;
      }
  }
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  return ok ? 0 : kExitSolver;
}

// ---------------------------------------------------------- galerkin-sweep

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError({std::string(flag) + ": cannot parse '" + item + "'"});
    }
  }
  return out;
}

int cmd_galerkin_sweep(const CommonOptions& o, const std::string& eps_list,
                       const std::string& n_list) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config(o, RunMode::Dynamic);
  const fs::path dir = cfg.io.out_dir;
  ensure_directory(dir.string());
  const std::vector<double> eps = parse_list(eps_list, "--eps-list");
  std::vector<double> ns = n_list.empty() ? std::vector<double>{0.0} : parse_list(n_list, "--n-list");
  const DynamicState initial = build_dynamic_initial(cfg);

  // Run 0 is the reference: epsilon = 0 without truncation.
  std::vector<RunConfig> configs;
  RunConfig ref = cfg;
  ref.scheme.epsilon = 0.0;
  ref.scheme.n_galerkin = 0;
  configs.push_back(ref);
  for (double N : ns)
    for (double e : eps) {
      RunConfig c = cfg;
      c.scheme.epsilon = e;
      c.scheme.n_galerkin = static_cast<int>(N);
      configs.push_back(c);
    }
  std::vector<std::string> violations;
  for (auto& c : configs) {
    c.io.apriori_stride = 0;
    for (const auto& v : c.violations(RunMode::Dynamic)) violations.push_back(v);
  }
  if (!violations.empty()) throw ValidationError(violations);

  std::vector<DynamicRun> runs(configs.size());
  parallel_chunks(configs.size(), [&](std::size_t r) {
    runs[r] = simulate_dynamic(configs[r], initial, false);
  });

  Manifest m;
  m.command = "galerkin-sweep";
  std::ostringstream table;
  table << "run,epsilon,n_galerkin,distance_to_reference,energy_law_residual,"
           "energy_law_residual_eps\n";
  bool ok = true;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const std::string name = "run_" + std::to_string(r);
    ensure_directory((dir / name).string());
    write_file(dir / name / "diagnostics.csv",
               [&](std::ostream& out) { write_csv(out, runs[r].records); });
    m.files.push_back(name + "/diagnostics.csv");
    ok = ok && runs[r].summary.ok;
    const double dist = state_distance(runs[r].summary.final_state, runs[0].summary.final_state);
    char row[256];
    std::snprintf(row, sizeof row, "%zu,%.17g,%d,%.17g,%.17g,%.17g\n", r,
                  configs[r].scheme.epsilon, configs[r].scheme.n_galerkin, dist,
                  energy_law_residual(runs[r].records), energy_law_residual(runs[r].records, true));
    table << row;
    std::printf("run %zu: epsilon %.3e N %d distance %.6e\n", r, configs[r].scheme.epsilon,
                configs[r].scheme.n_galerkin, dist);
  }
  write_file(dir / "sweep.csv", [&](std::ostream& out) { out << table.str(); });
  m.files.insert(m.files.begin(), "sweep.csv");
  if (!ok) {
    for (const auto& r : runs)
      if (!r.summary.ok) {
        fail_manifest(m, r.summary.error, r.summary.failure_time);
        break;
      }
  }
  m.wall_seconds = seconds_since(start);
  write_manifest(dir.string(), cfg, m);
  return ok ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prestrain_lab: stress-assisted diffusion with prestrain on the periodic box"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  CommonOptions sim_o, quasi_o, twin_o, verify_o, conv_o, sweep_o;
  std::optional<double> picard_tol;
  std::optional<int> max_iter;
  double delta = 0.0;
  std::string axioms;
  std::size_t samples = 1000;
  std::optional<double> appendix_c;
  int levels = 3;
  std::string eps_list = "0.1,0.01,0.001";
  std::string n_list;

  auto* sim = app.add_subcommand("simulate", "dynamic run to scheme.T_end");
  add_common(sim, sim_o);
  auto* quasi = app.add_subcommand("quasistatic", "quasi-static run to scheme.T_end");
  add_common(quasi, quasi_o);
  quasi->add_option("--picard-tol", picard_tol, "relative Picard tolerance");
  quasi->add_option("--max-iter", max_iter, "Picard iteration limit per step");
  auto* twin = app.add_subcommand("twin", "paired dynamic runs with phi0 perturbed by delta");
  add_common(twin, twin_o);
  twin->add_option("--delta", delta, "perturbation size (L2 norm)")->required();
  auto* verify = app.add_subcommand("verify-density", "coercivity, axioms and appendix check");
  add_common(verify, verify_o);
  verify->add_option("--axioms", axioms, "comma list of i,ii,iii,iv or 'all'");
  verify->add_option("--samples", samples, "number of random samples")->check(CLI::PositiveNumber);
  verify->add_option("--c", appendix_c, "run the appendix inequality check with this c");
  auto* conv = app.add_subcommand("convergence", "energy-law residual under dt halving");
  add_common(conv, conv_o);
  conv->add_option("--levels", levels, "number of dt levels");
  auto* sweep = app.add_subcommand("galerkin-sweep", "epsilon / mode-cutoff ladder");
  add_common(sweep, sweep_o);
  sweep->add_option("--eps-list", eps_list, "comma list of epsilon values");
  sweep->add_option("--n-list", n_list, "comma list of mode cutoffs (0: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_o);
    if (*quasi) return cmd_quasistatic(quasi_o, picard_tol, max_iter);
    if (*twin) return cmd_twin(twin_o, delta);
    if (*verify) return cmd_verify_density(verify_o, axioms, samples, appendix_c);
    if (*conv) return cmd_convergence(conv_o, levels);
    if (*sweep) return cmd_galerkin_sweep(sweep_o, eps_list, n_list);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid configuration:\n");
    for (const auto& v : e.violations()) std::fprintf(stderr, "  %s\n", v.c_str());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "configuration parse error: %s\n", e.what());
    return kExitConfig;
  } catch (const SolverError& e) {
    return report_solver_failure(e.what(), e.has_time() ? e.time() : 0.0);
  } catch (const NotElliptic& e) {
    std::fprintf(stderr, "solver setup failed: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
