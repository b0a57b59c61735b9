#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "prestrain/field.hpp"

namespace prestrain {

/// Binary field blob, all little-endian:
///   u64 n | f64 L | u64 component count |
///   component-major half-layout coefficients as (re, im) f64 pairs.
/// The reader rebuilds the grid with the given dealias fraction.
template <int C>
void write_field_blob(std::ostream& out, const Field<C>& f);

template <int C>
Field<C> read_field_blob(std::istream& in, double dealias_fraction = 2.0 / 3.0);

/// JSON summary (norms only): n, L, components, means, L2 and H1..H3 norms.
template <int C>
std::string field_summary_json(const Field<C>& f);

namespace io_detail {
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
}  // namespace io_detail

}  // namespace prestrain
