#include "prestrain/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "prestrain/constitutive.hpp"
#include "prestrain/jet.hpp"
#include "prestrain/parallel.hpp"
#include "prestrain/spectral.hpp"

namespace prestrain {

namespace {

constexpr const char* kColumns[] = {"t",        "E0",       "dissipation",    "E_big",
                                    "Z_big",    "E_eps",    "xi_running",     "mean_phi",
                                    "mean_v_x", "mean_v_y", "mean_v_z",       "min_det_grad_u",
                                    "picard_iters"};
constexpr int kColumnCount = 13;

void append_double(std::string& out, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

void append_optional(std::string& out, const std::optional<double>& x) {
  if (x) append_double(out, *x);
}

double parse_cell(const std::string& cell, std::size_t line) {
  double x = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ParseError("diagnostics.csv line " + std::to_string(line) + ": bad number '" + cell +
                     "'");
  return x;
}

std::optional<double> parse_optional(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  return parse_cell(cell, line);
}

/// sum_k |k|^6 |f_hat|^2 over the box, i.e. the sum of ||d_i d_j d_k f||^2.
template <int C>
double third_derivative_norm_squared(const Field<C>& f) {
  const Grid& g = *f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    const double k2 = g.k_squared(m);
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += std::norm(f.data(c)[m]);
    acc += g.parseval_weight(m) * k2 * k2 * k2 * s;
  }
  return acc * g.volume();
}

/// Physical samples of phi and grad w with their first and second partials.
struct TaylorSamples {
  Samples<1> phi;
  Samples<9> grad;
  std::array<Samples<1>, 3> phi_d;
  std::array<Samples<9>, 3> grad_d;
  std::array<Samples<1>, 6> phi_dd;  // pairs (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
  std::array<Samples<9>, 6> grad_dd;
};

constexpr int kPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

TaylorSamples taylor_samples(const ScalarField& phi, const VectorField& w) {
  TaylorSamples t;
  const MatrixField G = gradient(w);
  t.phi = to_physical(phi);
  t.grad = to_physical(G);
  for (int i = 0; i < 3; ++i) {
    t.phi_d[i] = to_physical(partial(phi, {i}));
    t.grad_d[i] = to_physical(partial(G, {i}));
  }
  for (int p = 0; p < 6; ++p) {
    t.phi_dd[p] = to_physical(partial(phi, {kPairs[p][0], kPairs[p][1]}));
    t.grad_dd[p] = to_physical(partial(G, {kPairs[p][0], kPairs[p][1]}));
  }
  return t;
}

using SpatialJet = Jet<Layout<3, 3>>;

/// R_ijk at every node for the ten sorted triples, by pushing the quadratic
/// Taylor polynomial of (phi, grad u) through dW/dphi.
std::array<RealBuffer, 10> correction_samples(const ScalarField& phi, const VectorField& w,
                                              const DensityModel& model) {
  if (!phi.grid() || !w.grid() || !phi.grid()->same_as(*w.grid())) throw GridMismatch();
  const GridPtr& grid = w.grid();
  const TaylorSamples ts = taylor_samples(phi, w);

  using L = Layout<3, 3>;
  const auto& tables = L::tables();
  int unit[3];
  int pair_index[6];
  int triple_index[10];
  double triple_factorial[10];
  for (int i = 0; i < 3; ++i) unit[i] = tables.unit[i];
  for (int p = 0; p < 6; ++p) {
    L::Exponent e{};
    ++e[kPairs[p][0]];
    ++e[kPairs[p][1]];
    pair_index[p] = L::index_of(e);
  }
  for (int t = 0; t < 10; ++t) {
    const Triple& tr = sorted_triples()[t];
    L::Exponent e{};
    ++e[tr.i];
    ++e[tr.j];
    ++e[tr.k];
    triple_index[t] = L::index_of(e);
    triple_factorial[t] = tables.factorial[triple_index[t]];
  }

  std::array<RealBuffer, 10> out;
  for (auto& buf : out) buf.assign(grid->node_count(), 0.0);

  const int n = grid->n();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t chunk) {
    for (std::size_t node = chunk * plane; node < (chunk + 1) * plane; ++node) {
      SpatialJet jphi(ts.phi.at(0, node));
      Mat3<SpatialJet> jF;
      for (int c = 0; c < 9; ++c) jF.a[c] = SpatialJet(ts.grad.at(c, node) + (c % 4 == 0 ? 1.0 : 0.0));
      for (int i = 0; i < 3; ++i) {
        jphi[unit[i]] = ts.phi_d[i].at(0, node);
        for (int c = 0; c < 9; ++c) jF.a[c][unit[i]] = ts.grad_d[i].at(c, node);
      }
      for (int p = 0; p < 6; ++p) {
        // coefficient of x_i x_j is the partial divided by alpha!
        const double scale = kPairs[p][0] == kPairs[p][1] ? 0.5 : 1.0;
        jphi[pair_index[p]] = scale * ts.phi_dd[p].at(0, node);
        for (int c = 0; c < 9; ++c) jF.a[c][pair_index[p]] = scale * ts.grad_dd[p].at(c, node);
      }
      const SpatialJet g = respond(model, jphi, jF, true).chemical_potential;
      for (int t = 0; t < 10; ++t) out[t][node] = triple_factorial[t] * g[triple_index[t]];
    }
  });
  return out;
}

}  // namespace

std::string csv_header() {
  std::string out;
  for (int c = 0; c < kColumnCount; ++c) {
    if (c) out += ',';
    out += kColumns[c];
  }
  return out;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  append_double(out, r.t);
  out += ',';
  append_double(out, r.E0);
  out += ',';
  append_double(out, r.dissipation);
  out += ',';
  append_optional(out, r.E_big);
  out += ',';
  append_optional(out, r.Z_big);
  out += ',';
  append_optional(out, r.E_eps);
  out += ',';
  append_optional(out, r.xi_running);
  out += ',';
  append_double(out, r.mean_phi);
  for (double m : r.mean_v) {
    out += ',';
    append_double(out, m);
  }
  out += ',';
  append_double(out, r.min_det_grad_u);
  out += ',';
  if (r.picard_iters) out += std::to_string(*r.picard_iters);
  return out;
}

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw ParseError("diagnostics.csv: missing or unexpected header");
  std::vector<DiagnosticsRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (static_cast<int>(cells.size()) != kColumnCount)
      throw ParseError("diagnostics.csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(kColumnCount) + " cells");
    DiagnosticsRecord r;
    r.t = parse_cell(cells[0], line_no);
    r.E0 = parse_cell(cells[1], line_no);
    r.dissipation = parse_cell(cells[2], line_no);
    r.E_big = parse_optional(cells[3], line_no);
    r.Z_big = parse_optional(cells[4], line_no);
    r.E_eps = parse_optional(cells[5], line_no);
    r.xi_running = parse_optional(cells[6], line_no);
    r.mean_phi = parse_cell(cells[7], line_no);
    for (int d = 0; d < 3; ++d) r.mean_v[d] = parse_cell(cells[8 + d], line_no);
    r.min_det_grad_u = parse_cell(cells[11], line_no);
    if (!cells[12].empty()) r.picard_iters = static_cast<int>(parse_cell(cells[12], line_no));
    records.push_back(r);
  }
  return records;
}

double kinetic_energy(const VectorField& v) {
  const double n = l2_norm(v);
  return 0.5 * n * n;
}

double energy_E0(const DynamicState& s, const DensityModel& model) {
  return evaluate_material(model, s.phi, s.w, kEnergy).energy + kinetic_energy(s.v);
}

double energy_E0(const QuasiState& s, const DensityModel& model) {
  return evaluate_material(model, s.phi, s.w, kEnergy).energy;
}

DissipationPaths dissipation_paths(const ScalarField& chemical) {
  DissipationPaths p;
  const ScalarField phi_t = laplacian(chemical);
  const ScalarField psi = inverse_laplacian(phi_t);
  p.through_inverse = gradient_sobolev_norm_squared(psi, 0);
  ScalarField centered = chemical;
  centered.data()[0] = 0.0;
  p.direct = gradient_sobolev_norm_squared(centered, 0);
  return p;
}

double dissipation_rate(const ScalarField& chemical) {
  const DissipationPaths p = dissipation_paths(chemical);
  const double scale = std::max(p.direct, p.through_inverse);
  if (std::abs(p.direct - p.through_inverse) > 1e-10 * scale)
    throw std::logic_error("dissipation: the two evaluation paths disagree");
  return p.direct;
}

double dissipation_rate(const DynamicState& s, const DensityModel& model) {
  return dissipation_rate(evaluate_material(model, s.phi, s.w, kChemical).chemical);
}

double energy_law_residual(const std::vector<DiagnosticsRecord>& records, bool use_eps) {
  if (records.empty()) return 0.0;
  auto energy = [&](const DiagnosticsRecord& r) {
    if (!use_eps) return r.E0;
    if (!r.E_eps) throw std::invalid_argument("energy_law_residual: record without E_eps");
    return *r.E_eps;
  };
  const double e0 = energy(records.front());
  double dissipated = 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    dissipated += 0.5 * (a.dissipation + b.dissipation) * (b.t - a.t);
    worst = std::max(worst, std::abs(energy(b) + dissipated - e0));
  }
  return worst;
}

double energy_E_eps(double E0, const VectorField& w, double epsilon) {
  return E0 + 0.5 * epsilon * gradient_sobolev_norm_squared(w, 0);
}

const std::array<Triple, 10>& sorted_triples() {
  static const std::array<Triple, 10> triples = [] {
    std::array<Triple, 10> t{};
    int m = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
          const int mult = (i == j && j == k) ? 1 : (i == j || j == k) ? 3 : 6;
          t[m++] = {i, j, k, mult};
        }
    return t;
  }();
  return triples;
}

std::array<ScalarField, 10> correction_R(const ScalarField& phi, const VectorField& w,
                                         const DensityModel& model) {
  const auto samples = correction_samples(phi, w, model);
  std::array<ScalarField, 10> out;
  for (int t = 0; t < 10; ++t) {
    Samples<1> s(w.grid());
    std::copy(samples[t].begin(), samples[t].end(), s.values.begin());
    out[t] = from_physical(s, false);
  }
  return out;
}

ScalarField correction_R(const ScalarField& phi, const VectorField& w, const DensityModel& model,
                         int i, int j, int k) {
  std::array<int, 3> idx{i, j, k};
  for (int d : idx)
    if (d < 0 || d > 2) throw std::invalid_argument("correction_R: indices must lie in {0, 1, 2}");
  std::sort(idx.begin(), idx.end());
  const auto& triples = sorted_triples();
  for (int t = 0; t < 10; ++t)
    if (triples[t].i == idx[0] && triples[t].j == idx[1] && triples[t].k == idx[2])
      return correction_R(phi, w, model)[t];
  throw std::logic_error("correction_R: unreachable");
}

AprioriEnergy apriori_E_terms(const DynamicState& s, const DensityModel& model) {
  const GridPtr& grid = s.w.grid();
  AprioriEnergy e;
  const double vl2 = l2_norm(s.v);
  e.kinetic = vl2 * vl2;
  e.kinetic3 = third_derivative_norm_squared(s.v);
  e.elastic = 2.0 * evaluate_material(model, s.phi, s.w, kEnergy).energy;

  const auto R = correction_samples(s.phi, s.w, model);
  const Samples<1> phi = to_physical(s.phi);
  const Samples<9> grad = to_physical(gradient(s.w));
  const MatrixField G = gradient(s.w);
  const auto& triples = sorted_triples();
  std::array<Samples<1>, 10> phi3;
  std::array<Samples<9>, 10> grad3;
  for (int t = 0; t < 10; ++t) {
    phi3[t] = to_physical(partial(s.phi, {triples[t].i, triples[t].j, triples[t].k}));
    grad3[t] = to_physical(partial(G, {triples[t].i, triples[t].j, triples[t].k}));
  }

  const int n = grid->n();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  std::vector<double> hess_acc(static_cast<std::size_t>(n), 0.0);
  std::vector<double> corr_acc(static_cast<std::size_t>(n), 0.0);
  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t chunk) {
    double h_sum = 0.0;
    double c_sum = 0.0;
    for (std::size_t node = chunk * plane; node < (chunk + 1) * plane; ++node) {
      Eigen::Matrix3d F;
      for (int c = 0; c < 9; ++c) F(c / 3, c % 3) = grad.at(c, node) + (c % 4 == 0 ? 1.0 : 0.0);
      const Eigen::Matrix<double, 10, 10> H =
          derivatives(model, phi.at(0, node), F, 2).hessian();
      for (int t = 0; t < 10; ++t) {
        Eigen::Matrix<double, 10, 1> z;
        z(0) = phi3[t].at(0, node);
        for (int c = 0; c < 9; ++c) z(1 + c) = grad3[t].at(c, node);
        h_sum += triples[t].multiplicity * z.dot(H * z);
        c_sum += triples[t].multiplicity * R[t][node] * z(0);
      }
    }
    hess_acc[chunk] = h_sum;
    corr_acc[chunk] = c_sum;
  });
  double h_total = 0.0;
  double c_total = 0.0;
  for (std::size_t c = 0; c < hess_acc.size(); ++c) {
    h_total += hess_acc[c];
    c_total += corr_acc[c];
  }
  const double cell = grid->volume() / static_cast<double>(grid->node_count());
  e.hessian = h_total * cell;
  e.correction = 2.0 * c_total * cell;
  return e;
}

double apriori_Z(const DynamicState& s) {
  const double v = sobolev_norm(s.v, 3);
  const double p = sobolev_norm(s.phi, 3);
  return v * v + gradient_sobolev_norm_squared(s.w, 3) + p * p;
}

namespace {

/// sum over ordered multi-indices of length <= 3 of ||d^alpha f||^2
template <int C>
double derivative_norms(const Field<C>& f) {
  double acc = 0.0;
  const double f0 = l2_norm(f);
  acc += f0 * f0;
  for (int i = 0; i < 3; ++i) {
    const double a = l2_norm(partial(f, {i}));
    acc += a * a;
    for (int j = 0; j < 3; ++j) {
      const double b = l2_norm(partial(f, {i, j}));
      acc += b * b;
      for (int k = 0; k < 3; ++k) {
        const double c = l2_norm(partial(f, {i, j, k}));
        acc += c * c;
      }
    }
  }
  return acc;
}

}  // namespace

double apriori_Z_derivatives(const DynamicState& s) {
  return derivative_norms(s.v) + derivative_norms(gradient(s.w)) + derivative_norms(s.phi);
}

void XiAccumulator::add(const QuasiState& s) {
  const double p = sobolev_norm(s.phi, 2);
  const double instant = p * p + gradient_sobolev_norm_squared(s.w, 2);
  const double rate =
      gradient_sobolev_norm_squared(s.phi, 2) + hessian_sobolev_norm_squared(s.w, 2);
  sup_ = std::max(sup_, instant);
  if (samples_ > 0) integral_ += 0.5 * (rate + last_rate_) * (s.t - last_t_);
  last_rate_ = rate;
  last_t_ = s.t;
  ++samples_;
}

double twin_divergence(const ScalarField& phi_a, const VectorField& w_a, const ScalarField& phi_b,
                       const VectorField& w_b) {
  phi_a.check_grid(phi_b);
  w_a.check_grid(w_b);
  const double d = l2_norm(phi_a - phi_b);
  return d * d + gradient_sobolev_norm_squared(w_a - w_b, 0);
}

Invariants invariants_snapshot(const DynamicState& s) {
  Invariants inv;
  inv.mean_phi = s.phi.mean();
  for (int d = 0; d < 3; ++d) inv.mean_v[d] = s.v.mean(d);
  inv.min_det = min_det_grad_u(s.w);
  return inv;
}

Invariants invariants_snapshot(const QuasiState& s) {
  Invariants inv;
  inv.mean_phi = s.phi.mean();
  inv.min_det = min_det_grad_u(s.w);
  return inv;
}

double elliptic_regularity_ratio(const QuasiState& s) {
  const double denom = gradient_sobolev_norm_squared(s.phi, 1);
  if (denom == 0.0) return 0.0;
  return std::sqrt(hessian_sobolev_norm_squared(s.w, 1) / denom);
}

DiagnosticsRecord dynamic_record(const DynamicState& s, const MaterialFields& material,
                                 double epsilon) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.E0 = material.energy + kinetic_energy(s.v);
  r.dissipation = dissipation_rate(material.chemical);
  r.Z_big = apriori_Z(s);
  r.E_eps = energy_E_eps(r.E0, s.w, epsilon);
  r.mean_phi = s.phi.mean();
  for (int d = 0; d < 3; ++d) r.mean_v[d] = s.v.mean(d);
  r.min_det_grad_u = material.min_det;
  return r;
}

DiagnosticsRecord quasi_record(const QuasiState& s, const MaterialFields& material) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.E0 = material.energy;
  r.dissipation = dissipation_rate(material.chemical);
  r.mean_phi = s.phi.mean();
  r.min_det_grad_u = material.min_det;
  return r;
}

}  // namespace prestrain
