#include "prestrain/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "prestrain/error.hpp"

namespace prestrain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_bool(const std::string& text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return out = true, true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return out = false, true;
  return false;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string bad(const std::string& key, const std::string& value, const std::string& what) {
  return key + ": cannot parse '" + value + "' as " + what;
}

}  // namespace

DensityModel ModelConfig::build() const {
  DensityModel m;
  m.base.kind = base;
  m.base.q = q;
  m.prestrain = PrestrainMap(M_B);
  m.composition = composition;
  m.quadratic_term = quadratic_term;
  return m;
}

DynamicConfig SchemeConfig::dynamic() const {
  DynamicConfig c;
  c.dt = dt;
  c.epsilon = epsilon;
  if (n_galerkin > 0) c.n_galerkin = n_galerkin;
  c.a_split = a_split;
  c.cfl_safety = cfl_safety;
  c.t_end = T_end;
  c.growth_limit = growth_limit;
  return c;
}

std::string RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  auto real = [&](double& target) -> std::string {
    double v;
    if (!parse_double(value, v)) return bad(key, value, "a number");
    target = v;
    return "";
  };
  auto integer = [&](int& target) -> std::string {
    long long v;
    if (!parse_int(value, v) || v < -(1LL << 31) || v >= (1LL << 31))
      return bad(key, value, "an integer");
    target = static_cast<int>(v);
    return "";
  };
  auto boolean = [&](bool& target) -> std::string {
    if (!parse_bool(value, target)) return bad(key, value, "a boolean");
    return "";
  };

  if (key == "grid.n") return integer(grid.n);
  if (key == "grid.L") return real(grid.L);
  if (key == "grid.dealias_fraction") return real(grid.dealias_fraction);
  if (key == "model.base") {
    try {
      model.base = parse_base_kind(value);
    } catch (const std::invalid_argument& e) {
      return key + ": " + e.what();
    }
    return "";
  }
  if (key == "model.q") return real(model.q);
  if (key == "model.composition") {
    try {
      model.composition = parse_composition(value);
    } catch (const std::invalid_argument& e) {
      return key + ": " + e.what();
    }
    return "";
  }
  if (key == "model.M_B") {
    std::vector<double> entries;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v;
      if (!parse_double(item, v)) return bad(key, value, "a list of numbers");
      entries.push_back(v);
    }
    if (entries.size() == 1) {
      model.M_B = entries[0] * Eigen::Matrix3d::Identity();
    } else if (entries.size() == 3) {
      model.M_B = Eigen::Vector3d(entries[0], entries[1], entries[2]).asDiagonal();
    } else if (entries.size() == 9) {
      for (int k = 0; k < 9; ++k) model.M_B(k / 3, k % 3) = entries[k];
    } else {
      return key + ": expected 1, 3 or 9 entries, got " + std::to_string(entries.size());
    }
    return "";
  }
  if (key == "model.quadratic_term") return boolean(model.quadratic_term);
  if (key == "scheme.dt") return real(scheme.dt);
  if (key == "scheme.epsilon") return real(scheme.epsilon);
  if (key == "scheme.N_galerkin") return integer(scheme.n_galerkin);
  if (key == "scheme.cfl_safety") return real(scheme.cfl_safety);
  if (key == "scheme.T_end") return real(scheme.T_end);
  if (key == "scheme.growth_limit") return real(scheme.growth_limit);
  if (key == "scheme.a_split") {
    if (value == "auto") {
      scheme.a_split.reset();
      return "";
    }
    double v;
    if (!parse_double(value, v)) return bad(key, value, "a number or 'auto'");
    scheme.a_split = v;
    return "";
  }
  if (key == "quasi.picard_tol") return real(quasi.picard_tol);
  if (key == "quasi.max_iter") return integer(quasi.max_iter);
  if (key == "quasi.newton_iters") return integer(quasi.newton_iters);
  if (key == "quasi.newton_tol") return real(quasi.newton_tol);
  if (key == "data.seed") {
    long long v;
    if (!parse_int(value, v) || v < 0) return bad(key, value, "a nonnegative integer");
    data.seed = static_cast<std::uint64_t>(v);
    return "";
  }
  if (key == "data.amplitude") return real(data.amplitude);
  if (key == "data.band") return integer(data.band);
  if (key == "data.mean_zero_phi") return boolean(data.mean_zero_phi);
  if (key == "data.mean_zero_v") return boolean(data.mean_zero_v);
  if (key == "io.out_dir") {
    if (value.empty()) return key + ": must not be empty";
    io.out_dir = value;
    return "";
  }
  if (key == "io.stride") return integer(io.stride);
  if (key == "io.apriori_stride") return integer(io.apriori_stride);
  if (key == "io.write_state") return boolean(io.write_state);
  return "unknown key '" + key + "'";
}

std::vector<std::string> RunConfig::violations(RunMode mode) const {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(grid.n >= 4 && grid.n % 2 == 0 && grid.n <= 1024, "grid.n must be an even integer in [4, 1024]");
  need(grid.L > 0.0 && std::isfinite(grid.L), "grid.L must be positive");
  need(grid.dealias_fraction > 0.0 && grid.dealias_fraction <= 1.0,
       "grid.dealias_fraction must lie in (0, 1]");
  const int cutoff = static_cast<int>(std::floor(grid.dealias_fraction * grid.n / 2.0));
  need(cutoff >= 1, "grid.dealias_fraction * grid.n / 2 must retain at least one mode");
  need(model.base == BaseKind::CaseStudy || model.q >= 2.0,
       "model.q must be >= 2 (q in (1, 2) is unsupported)");
  need(std::isfinite(model.q), "model.q must be finite");
  need(model.M_B.allFinite(), "model.M_B must be finite");
  need((model.M_B - model.M_B.transpose()).norm() <= 1e-14 * std::max(1.0, model.M_B.norm()),
       "model.M_B must be symmetric");
  need(scheme.dt > 0.0 && std::isfinite(scheme.dt), "scheme.dt must be positive");
  need(scheme.epsilon >= 0.0, "scheme.epsilon must be >= 0");
  need(scheme.n_galerkin >= 0 && scheme.n_galerkin <= grid.n / 2,
       "scheme.N_galerkin must lie in [0, grid.n / 2] (0 disables truncation)");
  need(scheme.cfl_safety > 0.0 && scheme.cfl_safety <= 1.0, "scheme.cfl_safety must lie in (0, 1]");
  need(scheme.T_end > 0.0 && std::isfinite(scheme.T_end), "scheme.T_end must be positive");
  need(!scheme.a_split || *scheme.a_split >= 0.0, "scheme.a_split must be >= 0");
  need(scheme.growth_limit > 1.0, "scheme.growth_limit must exceed 1");
  need(quasi.picard_tol > 0.0, "quasi.picard_tol must be positive");
  need(quasi.max_iter >= 1, "quasi.max_iter must be >= 1");
  need(quasi.newton_iters >= 0, "quasi.newton_iters must be >= 0");
  need(quasi.newton_tol > 0.0, "quasi.newton_tol must be positive");
  need(data.amplitude >= 0.0 && std::isfinite(data.amplitude), "data.amplitude must be >= 0");
  need(data.band >= 1 && data.band <= std::max(cutoff, 1),
       "data.band must lie in [1, dealias cutoff = " + std::to_string(cutoff) + "]");
  need(io.stride >= 1, "io.stride must be >= 1");
  need(io.apriori_stride >= 0, "io.apriori_stride must be >= 0");
  if (mode == RunMode::Quasistatic)
    need(data.mean_zero_phi,
         "data.mean_zero_phi must be true for quasistatic runs: phi0 is required to be mean-zero");
  return v;
}

void RunConfig::validate(RunMode mode) const {
  auto v = violations(mode);
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  auto d = format_double;
  os << "[grid]\n"
     << "n = " << grid.n << "\n"
     << "L = " << d(grid.L) << "\n"
     << "dealias_fraction = " << d(grid.dealias_fraction) << "\n\n"
     << "[model]\n"
     << "base = " << to_string(model.base) << "\n"
     << "q = " << d(model.q) << "\n"
     << "composition = " << to_string(model.composition) << "\n"
     << "M_B = ";
  for (int k = 0; k < 9; ++k) os << (k ? "," : "") << d(model.M_B(k / 3, k % 3));
  os << "\n"
     << "quadratic_term = " << (model.quadratic_term ? "true" : "false") << "\n\n"
     << "[scheme]\n"
     << "dt = " << d(scheme.dt) << "\n"
     << "epsilon = " << d(scheme.epsilon) << "\n"
     << "N_galerkin = " << scheme.n_galerkin << "\n"
     << "cfl_safety = " << d(scheme.cfl_safety) << "\n"
     << "T_end = " << d(scheme.T_end) << "\n"
     << "a_split = " << (scheme.a_split ? d(*scheme.a_split) : std::string("auto")) << "\n"
     << "growth_limit = " << d(scheme.growth_limit) << "\n\n"
     << "[quasi]\n"
     << "picard_tol = " << d(quasi.picard_tol) << "\n"
     << "max_iter = " << quasi.max_iter << "\n"
     << "newton_iters = " << quasi.newton_iters << "\n"
     << "newton_tol = " << d(quasi.newton_tol) << "\n\n"
     << "[data]\n"
     << "seed = " << data.seed << "\n"
     << "amplitude = " << d(data.amplitude) << "\n"
     << "band = " << data.band << "\n"
     << "mean_zero_phi = " << (data.mean_zero_phi ? "true" : "false") << "\n"
     << "mean_zero_v = " << (data.mean_zero_v ? "true" : "false") << "\n\n"
     << "[io]\n"
     << "out_dir = " << io.out_dir << "\n"
     << "stride = " << io.stride << "\n"
     << "apriori_stride = " << io.apriori_stride << "\n"
     << "write_state = " << (io.write_state ? "true" : "false") << "\n";
  return os.str();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> violations;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    if (auto it = seen.find(key); it != seen.end())
      violations.push_back(key + ": set twice (lines " + std::to_string(it->second) + " and " +
                           std::to_string(lineno) + ")");
    seen[key] = lineno;
    if (std::string msg = cfg.set(key, line.substr(eq + 1)); !msg.empty())
      violations.push_back("line " + std::to_string(lineno) + ": " + msg);
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace prestrain
