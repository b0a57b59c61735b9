#include "prestrain/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prestrain/constitutive.hpp"
#include "prestrain/parallel.hpp"
#include "prestrain/spectral.hpp"

namespace prestrain {

namespace {

struct ChunkResult {
  double energy = 0.0;
  double min_det = std::numeric_limits<double>::infinity();
  double max_dev = -1.0;
  std::size_t node = 0;
};

}  // namespace

MaterialFields evaluate_material(const DensityModel& model, const ScalarField& phi,
                                 const VectorField& w, unsigned need) {
  if (!phi.grid() || !w.grid() || !phi.grid()->same_as(*w.grid())) throw GridMismatch();
  const GridPtr& grid = w.grid();
  const Samples<1> p = to_physical(phi);
  const Samples<9> g = to_physical(gradient(w));

  Samples<9> stress;
  Samples<1> chem;
  const bool want_stress = need & kStress;
  const bool want_chem = need & kChemical;
  const bool gradients = want_stress || want_chem;
  if (want_stress) stress = Samples<9>(grid);
  if (want_chem) chem = Samples<1>(grid);

  const int n = grid->n();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  std::vector<ChunkResult> chunks(static_cast<std::size_t>(n));

  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t c) {
    ChunkResult acc;
    Mat3<double> F;
    for (std::size_t node = c * plane; node < (c + 1) * plane; ++node) {
      double dev2 = 0.0;
      for (int k = 0; k < 9; ++k) {
        const double h = g.at(k, node);
        F.a[k] = h + ((k % 4 == 0) ? 1.0 : 0.0);
        dev2 += h * h;
      }
      const double ph = p.at(0, node);
      const double d = det(F);
      acc.min_det = std::min(acc.min_det, d);
      const double dev = std::abs(ph) + std::sqrt(dev2);
      if (dev > acc.max_dev) {
        acc.max_dev = dev;
        acc.node = node;
      }
      const Response<double> r = respond(model, ph, F, gradients);
      acc.energy += r.energy;
      if (want_stress)
        for (int k = 0; k < 9; ++k) stress.at(k, node) = r.stress.a[k];
      if (want_chem) chem.at(0, node) = r.chemical_potential;
    }
    chunks[c] = acc;
  });

  MaterialFields out;
  out.min_det = std::numeric_limits<double>::infinity();
  out.max_deviation = -1.0;
  std::size_t stiff = 0;
  double energy = 0.0;
  for (const ChunkResult& c : chunks) {
    energy += c.energy;
    out.min_det = std::min(out.min_det, c.min_det);
    if (c.max_dev > out.max_deviation) {
      out.max_deviation = c.max_dev;
      stiff = c.node;
    }
  }
  out.energy = energy * grid->volume() / static_cast<double>(grid->node_count());
  out.stiff_phi = p.at(0, stiff);
  for (int k = 0; k < 9; ++k)
    out.stiff_F(k / 3, k % 3) = g.at(k, stiff) + ((k % 4 == 0) ? 1.0 : 0.0);
  if (want_stress) out.stress = from_physical(stress, true);
  if (want_chem) out.chemical = from_physical(chem, true);
  return out;
}

MatrixField stress_directional(const DensityModel& model, const ScalarField& phi,
                               const VectorField& w, const VectorField& dw) {
  using J = Jet<Layout<1, 1>>;
  const GridPtr& grid = w.grid();
  const Samples<1> p = to_physical(phi);
  const Samples<9> g = to_physical(gradient(w));
  const Samples<9> dg = to_physical(gradient(dw));
  Samples<9> out(grid);
  const int n = grid->n();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t c) {
    Mat3<J> F;
    for (std::size_t node = c * plane; node < (c + 1) * plane; ++node) {
      for (int k = 0; k < 9; ++k) {
        J x(g.at(k, node) + ((k % 4 == 0) ? 1.0 : 0.0));
        x[1] = dg.at(k, node);
        F.a[k] = x;
      }
      const Response<J> r = respond(model, J(p.at(0, node)), F, true);
      for (int k = 0; k < 9; ++k) out.at(k, node) = r.stress.a[k][1];
    }
  });
  return from_physical(out, true);
}

double min_det_grad_u(const VectorField& w) {
  const Samples<9> g = to_physical(gradient(w));
  double m = std::numeric_limits<double>::infinity();
  Mat3<double> F;
  for (std::size_t node = 0; node < g.nodes(); ++node) {
    for (int k = 0; k < 9; ++k) F.a[k] = g.at(k, node) + ((k % 4 == 0) ? 1.0 : 0.0);
    m = std::min(m, det(F));
  }
  return m;
}

}  // namespace prestrain
