#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prestrain/density.hpp"
#include "prestrain/dynamic_solver.hpp"

namespace prestrain {

struct GridConfig {
  int n = 32;
  double L = 6.283185307179586;
  double dealias_fraction = 2.0 / 3.0;
};

struct ModelConfig {
  BaseKind base = BaseKind::W01;
  double q = 2.0;
  Composition composition = Composition::Right;
  Eigen::Matrix3d M_B = 0.1 * Eigen::Matrix3d::Identity();
  bool quadratic_term = true;

  DensityModel build() const;
};

struct SchemeConfig {
  double dt = 1e-3;
  double epsilon = 0.0;
  int n_galerkin = 0;  // 0: no truncation
  double cfl_safety = 0.5;
  double T_end = 1.0;
  std::optional<double> a_split;  // unset: d^2W/dphi^2 at (0, I)
  double growth_limit = 1e3;

  DynamicConfig dynamic() const;
};

struct QuasiConfig {
  double picard_tol = 1e-10;
  int max_iter = 50;
  /// 0 disables the Newton polish after each step.
  int newton_iters = 0;
  double newton_tol = 1e-12;
};

struct DataConfig {
  std::uint64_t seed = 1;
  double amplitude = 1e-2;
  int band = 2;
  bool mean_zero_phi = true;
  bool mean_zero_v = true;
};

struct IoConfig {
  std::string out_dir = "out";
  int stride = 1;
  /// E_big every this many records; 0 means only at t = 0.
  int apriori_stride = 10;
  bool write_state = true;
};

enum class RunMode { Dynamic, Quasistatic };

struct RunConfig {
  GridConfig grid;
  ModelConfig model;
  SchemeConfig scheme;
  QuasiConfig quasi;
  DataConfig data;
  IoConfig io;

  /// Sets one dotted key from text. Returns a violation message or "".
  std::string set(const std::string& key, const std::string& value);
  /// Every violated range constraint, including mode-specific ones.
  std::vector<std::string> violations(RunMode mode) const;
  /// Throws ValidationError listing all violations.
  void validate(RunMode mode) const;
  /// Effective configuration in the same key = value format.
  std::string to_text() const;
};

/// Reads key = value lines; "[section]" headers prefix later keys with
/// "section.", '#' starts a comment. ParseError for malformed lines or an
/// unreadable file, ValidationError (all violations) for bad keys or values.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

}  // namespace prestrain
