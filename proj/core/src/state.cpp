#include "prestrain/state.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "prestrain/field_io.hpp"

namespace prestrain {

namespace {

constexpr char kMagic[8] = {'P', 'L', 'S', 'T', 'A', 'T', 'E', '1'};

void write_header(std::ostream& out, double t, std::uint64_t count) {
  out.write(kMagic, sizeof kMagic);
  io_detail::write_f64(out, t);
  io_detail::write_u64(out, count);
}

void write_name(std::ostream& out, const std::string& name) {
  io_detail::write_u64(out, name.size());
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
}

double read_header(std::istream& in, std::uint64_t expected) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error("state blob: bad magic");
  const double t = io_detail::read_f64(in);
  const auto count = io_detail::read_u64(in);
  if (count != expected)
    throw Error("state blob: expected " + std::to_string(expected) + " fields, found " +
                std::to_string(count));
  return t;
}

void expect_name(std::istream& in, const std::string& name) {
  const auto size = io_detail::read_u64(in);
  if (size > 64) throw Error("state blob: implausible field name length");
  std::string got(size, '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(size)) || got != name)
    throw Error("state blob: expected field '" + name + "'");
}

}  // namespace

DynamicState DynamicState::zero(const GridPtr& grid) {
  return {VectorField(grid), VectorField(grid), ScalarField(grid), 0.0};
}

QuasiState QuasiState::zero(const GridPtr& grid) {
  return {VectorField(grid), ScalarField(grid), 0.0};
}

void write_state(std::ostream& out, const DynamicState& s) {
  write_header(out, s.t, 3);
  write_name(out, "w");
  write_field_blob(out, s.w);
  write_name(out, "v");
  write_field_blob(out, s.v);
  write_name(out, "phi");
  write_field_blob(out, s.phi);
}

void write_state(std::ostream& out, const QuasiState& s) {
  write_header(out, s.t, 2);
  write_name(out, "w");
  write_field_blob(out, s.w);
  write_name(out, "phi");
  write_field_blob(out, s.phi);
}

DynamicState read_dynamic_state(std::istream& in, double dealias_fraction) {
  DynamicState s;
  s.t = read_header(in, 3);
  expect_name(in, "w");
  s.w = read_field_blob<3>(in, dealias_fraction);
  expect_name(in, "v");
  s.v = read_field_blob<3>(in, dealias_fraction);
  expect_name(in, "phi");
  s.phi = read_field_blob<1>(in, dealias_fraction);
  return s;
}

QuasiState read_quasi_state(std::istream& in, double dealias_fraction) {
  QuasiState s;
  s.t = read_header(in, 2);
  expect_name(in, "w");
  s.w = read_field_blob<3>(in, dealias_fraction);
  expect_name(in, "phi");
  s.phi = read_field_blob<1>(in, dealias_fraction);
  return s;
}

void save_state(const std::string& path, const DynamicState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_state(out, s);
}

void save_state(const std::string& path, const QuasiState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_state(out, s);
}

}  // namespace prestrain
