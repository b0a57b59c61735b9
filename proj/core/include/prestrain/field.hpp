#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "prestrain/error.hpp"
#include "prestrain/grid.hpp"

namespace prestrain {

/// Band-limited real field with C components on a periodic grid, stored as
/// half-layout Fourier coefficients (component-major). Component (i, j) of a
/// matrix field lives at index 3 * i + j.
template <int C>
class Field {
 public:
  static constexpr int components = C;

  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), coeffs_(C * grid_->mode_count()) {}

  const GridPtr& grid() const { return grid_; }
  bool empty() const { return !grid_; }
  std::size_t modes() const { return grid_->mode_count(); }

  Complex* data(int c = 0) { return coeffs_.data() + c * modes(); }
  const Complex* data(int c = 0) const { return coeffs_.data() + c * modes(); }
  std::span<Complex> coefficients(int c = 0) { return {data(c), modes()}; }
  std::span<const Complex> coefficients(int c = 0) const { return {data(c), modes()}; }
  std::span<const Complex> all_coefficients() const { return coeffs_; }
  std::span<Complex> all_coefficients() { return coeffs_; }

  double mean(int c = 0) const { return data(c)[0].real(); }

  Field& operator+=(const Field& other) {
    check_grid(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    check_grid(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& z : coeffs_) z *= s;
    return *this;
  }
  /// this += s * other
  Field& axpy(double s, const Field& other) {
    check_grid(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
    return *this;
  }

  void check_grid(const Field& other) const {
    if (!grid_ || !other.grid_ || !grid_->same_as(*other.grid_)) throw GridMismatch();
  }

 private:
  GridPtr grid_;
  ComplexBuffer coeffs_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using MatrixField = Field<9>;

template <int C>
Field<C> operator+(Field<C> a, const Field<C>& b) {
  return a += b;
}
template <int C>
Field<C> operator-(Field<C> a, const Field<C>& b) {
  return a -= b;
}
template <int C>
Field<C> operator*(double s, Field<C> a) {
  return a *= s;
}

/// Physical samples of a C-component field, component-major, node index
/// (i0 * n + i1) * n + i2 with x_d = L * i_d / n.
template <int C>
struct Samples {
  GridPtr grid;
  RealBuffer values;

  Samples() = default;
  explicit Samples(GridPtr g) : grid(std::move(g)), values(C * grid->node_count()) {}

  std::size_t nodes() const { return grid->node_count(); }
  double* component(int c) { return values.data() + c * nodes(); }
  const double* component(int c) const { return values.data() + c * nodes(); }
  double& at(int c, std::size_t node) { return values[c * nodes() + node]; }
  double at(int c, std::size_t node) const { return values[c * nodes() + node]; }
};

template <int C>
Samples<C> to_physical(const Field<C>& f) {
  Samples<C> out(f.grid());
  for (int c = 0; c < C; ++c) f.grid()->inverse(f.data(c), out.component(c));
  return out;
}

/// Zeroes every coefficient outside the dealias band (and all Nyquist modes).
template <int C>
void apply_dealias(Field<C>& f) {
  const Grid& g = *f.grid();
  for (int c = 0; c < C; ++c) {
    Complex* z = f.data(c);
    for (std::size_t m = 0; m < g.mode_count(); ++m)
      if (!g.retained(m)) z[m] = 0.0;
  }
}

/// Forward transform of samples; the dealias mask is applied unless disabled.
template <int C>
Field<C> from_physical(const Samples<C>& s, bool dealias = true) {
  Field<C> out(s.grid);
  for (int c = 0; c < C; ++c) s.grid->forward(s.component(c), out.data(c));
  if (dealias) apply_dealias(out);
  return out;
}

/// Samples fn(x, y, z) -> std::array<double, C> at every node (no dealiasing).
template <int C, class Fn>
Field<C> field_from_function(const GridPtr& grid, Fn&& fn) {
  Samples<C> s(grid);
  const int n = grid->n();
  std::size_t node = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2, ++node) {
        const std::array<double, C> v =
            fn(grid->coordinate(i0), grid->coordinate(i1), grid->coordinate(i2));
        for (int c = 0; c < C; ++c) s.at(c, node) = v[c];
      }
  return from_physical(s, false);
}

inline ScalarField scalar_from_function(const GridPtr& grid, auto&& fn) {
  return field_from_function<1>(grid, [&](double x, double y, double z) {
    return std::array<double, 1>{fn(x, y, z)};
  });
}

}  // namespace prestrain
