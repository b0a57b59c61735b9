#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <tuple>
#include <utility>

#include "prestrain/field.hpp"
#include "prestrain/parallel.hpp"

namespace prestrain {

/// Spectral partial derivative d/dx_{d1} d/dx_{d2} ... applied componentwise.
/// Nyquist modes are zeroed (they carry no real-valued odd derivative).
template <int C>
Field<C> partial(const Field<C>& f, std::initializer_list<int> dims) {
  const Grid& g = *f.grid();
  Field<C> out(f.grid());
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    Complex symbol = 1.0;
    if (g.nyquist(m)) {
      symbol = 0.0;
    } else {
      for (int d : dims) symbol *= Complex(0.0, g.wavenumber(d, m));
    }
    for (int c = 0; c < C; ++c) out.data(c)[m] = symbol * f.data(c)[m];
  }
  return out;
}

inline VectorField gradient(const ScalarField& f) {
  const Grid& g = *f.grid();
  VectorField out(f.grid());
  const Complex* z = f.data();
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    for (int j = 0; j < 3; ++j) out.data(j)[m] = Complex(0.0, g.wavenumber(j, m)) * z[m];
  }
  return out;
}

/// Gradient of a vector field: row i of the result is grad(component i),
/// i.e. out(i, j) = d v_i / d x_j.
inline MatrixField gradient(const VectorField& v) {
  const Grid& g = *v.grid();
  MatrixField out(v.grid());
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    for (int i = 0; i < 3; ++i) {
      const Complex z = v.data(i)[m];
      for (int j = 0; j < 3; ++j)
        out.data(3 * i + j)[m] = Complex(0.0, g.wavenumber(j, m)) * z;
    }
  }
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = *v.grid();
  ScalarField out(v.grid());
  Complex* z = out.data();
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    Complex acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += Complex(0.0, g.wavenumber(j, m)) * v.data(j)[m];
    z[m] = acc;
  }
  return out;
}

/// Row-wise divergence: out_i = sum_j d M_ij / d x_j.
inline VectorField divergence_rowwise(const MatrixField& M) {
  const Grid& g = *M.grid();
  VectorField out(M.grid());
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    for (int i = 0; i < 3; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < 3; ++j)
        acc += Complex(0.0, g.wavenumber(j, m)) * M.data(3 * i + j)[m];
      out.data(i)[m] = acc;
    }
  }
  return out;
}

template <int C>
Field<C> laplacian(const Field<C>& f) {
  const Grid& g = *f.grid();
  Field<C> out(f.grid());
  for (int c = 0; c < C; ++c)
    for (std::size_t m = 0; m < g.mode_count(); ++m)
      out.data(c)[m] = -g.k_squared(m) * f.data(c)[m];
  return out;
}

/// L2 inner product over the box (exact for band-limited fields).
template <int C>
double inner_product(const Field<C>& a, const Field<C>& b) {
  a.check_grid(b);
  const Grid& g = *a.grid();
  double acc = 0.0;
  for (int c = 0; c < C; ++c) {
    const Complex* x = a.data(c);
    const Complex* y = b.data(c);
    for (std::size_t m = 0; m < g.mode_count(); ++m)
      acc += g.parseval_weight(m) * (x[m].real() * y[m].real() + x[m].imag() * y[m].imag());
  }
  return acc * g.volume();
}

/// H^k norm with Fourier weights (1 + |k|^2)^k, summed over components.
template <int C>
double sobolev_norm(const Field<C>& f, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("sobolev_norm: order must lie in [0, 4]");
  const Grid& g = *f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    const double w = g.parseval_weight(m) * std::pow(1.0 + g.k_squared(m), order);
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += std::norm(f.data(c)[m]);
    acc += w * s;
  }
  return std::sqrt(acc * g.volume());
}

template <int C>
double l2_norm(const Field<C>& f) {
  return sobolev_norm(f, 0);
}

/// Squared H^k norm of the gradient, sum_k |k|^2 (1 + |k|^2)^order |f_hat|^2.
template <int C>
double gradient_sobolev_norm_squared(const Field<C>& f, int order) {
  const Grid& g = *f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    const double k2 = g.k_squared(m);
    const double w = g.parseval_weight(m) * k2 * std::pow(1.0 + k2, order);
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += std::norm(f.data(c)[m]);
    acc += w * s;
  }
  return acc * g.volume();
}

/// Squared H^k norm of the full Hessian, sum_k |k|^4 (1 + |k|^2)^order |f_hat|^2.
template <int C>
double hessian_sobolev_norm_squared(const Field<C>& f, int order) {
  const Grid& g = *f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (g.nyquist(m)) continue;
    const double k2 = g.k_squared(m);
    const double w = g.parseval_weight(m) * k2 * k2 * std::pow(1.0 + k2, order);
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += std::norm(f.data(c)[m]);
    acc += w * s;
  }
  return acc * g.volume();
}

/// Solves -Laplace(psi) = f - mean(f) for mean-zero psi. The mean of f must
/// not exceed mean_tol (default 1e-12 times the RMS of f).
ScalarField inverse_laplacian(const ScalarField& f, std::optional<double> mean_tol = std::nullopt);

/// Zeroes every coefficient whose max-norm wavevector index exceeds N.
template <int C>
Field<C> truncate_modes(const Field<C>& f, int N) {
  const Grid& g = *f.grid();
  if (N < 1 || N > g.n() / 2) throw std::invalid_argument("truncate_modes: N must lie in [1, n/2]");
  Field<C> out = f;
  for (int c = 0; c < C; ++c) {
    Complex* z = out.data(c);
    for (std::size_t m = 0; m < g.mode_count(); ++m)
      if (g.max_index(m) > N) z[m] = 0.0;
  }
  return out;
}

/// True when the stored planes kz = 0 and kz = n/2 satisfy f(-k) = conj f(k),
/// i.e. the coefficients describe a real-valued field.
template <int C>
bool is_hermitian(const Field<C>& f, double tol = 1e-12) {
  const Grid& g = *f.grid();
  const int n = g.n();
  const int half = n / 2 + 1;
  double scale = 0.0;
  for (auto z : f.all_coefficients()) scale = std::max(scale, std::abs(z));
  const double bound = tol * std::max(scale, 1e-300);
  for (int c = 0; c < C; ++c) {
    const Complex* z = f.data(c);
    for (int i2 : {0, n / 2}) {
      for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1) {
          const int j0 = (n - i0) % n;
          const int j1 = (n - i1) % n;
          const Complex a = z[(static_cast<std::size_t>(i0) * n + i1) * half + i2];
          const Complex b = z[(static_cast<std::size_t>(j0) * n + j1) * half + i2];
          if (std::abs(a - std::conj(b)) > bound) return false;
        }
    }
  }
  return true;
}

namespace detail {

template <int C, std::size_t N>
void gather(const Samples<C>& s, std::size_t node, std::array<double, N>& out) {
  static_assert(N == static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) out[c] = s.at(c, node);
}

}  // namespace detail

/// Pseudo-spectral evaluation of a pointwise nonlinearity: transforms the
/// inputs to physical space, applies fn at each node, transforms back and
/// applies the dealias mask. fn receives one std::array<double, In> per input
/// and returns std::array<double, Out>. Exceptions thrown by fn propagate.
template <int Out, class Fn, int... In>
Field<Out> pointwise_map(Fn&& fn, const Field<In>&... inputs) {
  const auto& grids = std::array<const GridPtr*, sizeof...(In)>{&inputs.grid()...};
  const GridPtr& grid = *grids[0];
  for (auto* gp : grids)
    if (!(*gp) || !(*gp)->same_as(*grid)) throw GridMismatch();

  auto samples = std::make_tuple(to_physical(inputs)...);
  Samples<Out> result(grid);
  const int n = grid->n();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  constexpr auto seq = std::index_sequence_for<Field<In>...>{};

  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t chunk) {
    std::tuple<std::array<double, In>...> args;
    for (std::size_t node = chunk * plane; node < (chunk + 1) * plane; ++node) {
      [&]<std::size_t... I>(std::index_sequence<I...>) {
        (detail::gather(std::get<I>(samples), node, std::get<I>(args)), ...);
      }(seq);
      const std::array<double, Out> v = std::apply(fn, args);
      for (int c = 0; c < Out; ++c) result.at(c, node) = v[c];
    }
  });
  return from_physical(result, true);
}

}  // namespace prestrain
