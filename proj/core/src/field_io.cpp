#include "prestrain/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include "json.hpp"
#include <ostream>

#include "prestrain/spectral.hpp"

namespace prestrain {

namespace io_detail {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

}  // namespace

void write_u64(std::ostream& out, std::uint64_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  write_u64(out, bits);
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("field blob: truncated input");
  return to_little(v);
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace io_detail

template <int C>
void write_field_blob(std::ostream& out, const Field<C>& f) {
  using namespace io_detail;
  const Grid& g = *f.grid();
  write_u64(out, static_cast<std::uint64_t>(g.n()));
  write_f64(out, g.period());
  write_u64(out, static_cast<std::uint64_t>(C));
  for (const Complex& z : f.all_coefficients()) {
    write_f64(out, z.real());
    write_f64(out, z.imag());
  }
}

template <int C>
Field<C> read_field_blob(std::istream& in, double dealias_fraction) {
  using namespace io_detail;
  const auto n = read_u64(in);
  const double period = read_f64(in);
  const auto components = read_u64(in);
  if (components != static_cast<std::uint64_t>(C))
    throw Error("field blob: expected " + std::to_string(C) + " components, found " +
                std::to_string(components));
  if (n < 2 || n > 4096) throw Error("field blob: implausible grid size " + std::to_string(n));
  Field<C> f(Grid::create(static_cast<int>(n), period, dealias_fraction));
  for (Complex& z : f.all_coefficients()) {
    const double re = read_f64(in);
    const double im = read_f64(in);
    z = Complex(re, im);
  }
  return f;
}

template <int C>
std::string field_summary_json(const Field<C>& f) {
  const Grid& g = *f.grid();
  nlohmann::json j;
  j["n"] = g.n();
  j["L"] = g.period();
  j["components"] = C;
  std::vector<double> means;
  for (int c = 0; c < C; ++c) means.push_back(f.mean(c));
  j["mean"] = means;
  j["l2"] = sobolev_norm(f, 0);
  j["h1"] = sobolev_norm(f, 1);
  j["h2"] = sobolev_norm(f, 2);
  j["h3"] = sobolev_norm(f, 3);
  return j.dump();
}

template void write_field_blob<1>(std::ostream&, const Field<1>&);
template void write_field_blob<3>(std::ostream&, const Field<3>&);
template void write_field_blob<9>(std::ostream&, const Field<9>&);
template Field<1> read_field_blob<1>(std::istream&, double);
template Field<3> read_field_blob<3>(std::istream&, double);
template Field<9> read_field_blob<9>(std::istream&, double);
template std::string field_summary_json<1>(const Field<1>&);
template std::string field_summary_json<3>(const Field<3>&);
template std::string field_summary_json<9>(const Field<9>&);

}  // namespace prestrain
