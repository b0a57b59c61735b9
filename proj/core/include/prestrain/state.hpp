#pragma once

#include <iosfwd>
#include <string>

#include "prestrain/field.hpp"

namespace prestrain {

/// (w, v, phi) with w = u - id and v = u_t.
struct DynamicState {
  VectorField w;
  VectorField v;
  ScalarField phi;
  double t = 0.0;

  static DynamicState zero(const GridPtr& grid);
};

/// (w, phi) with w = u - id.
struct QuasiState {
  VectorField w;
  ScalarField phi;
  double t = 0.0;

  static QuasiState zero(const GridPtr& grid);
};

/// State blobs: magic "PLSTATE1", f64 t, u64 field count, then per field a
/// u64 name length, the name, and a field blob.
void write_state(std::ostream& out, const DynamicState& s);
void write_state(std::ostream& out, const QuasiState& s);
DynamicState read_dynamic_state(std::istream& in, double dealias_fraction = 2.0 / 3.0);
QuasiState read_quasi_state(std::istream& in, double dealias_fraction = 2.0 / 3.0);

void save_state(const std::string& path, const DynamicState& s);
void save_state(const std::string& path, const QuasiState& s);

}  // namespace prestrain
