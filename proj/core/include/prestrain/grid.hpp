#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <numbers>
#include <vector>

namespace prestrain {

using Complex = std::complex<double>;

/// 64-byte aligned storage so buffers match the alignment FFTW plans were made with.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), alignment));
  }
  void deallocate(T* ptr, std::size_t) noexcept { ::operator delete(ptr, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using RealBuffer = std::vector<double, AlignedAllocator<double>>;
using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid on the periodic box [0, L)^3 together with its real-to-complex
/// Fourier transform. Spectral arrays use the half layout n x n x (n/2 + 1);
/// coefficients are normalized so that f(x) = sum_k f_hat(k) exp(i k.x).
///
/// Grids are immutable and shared; create() hands out one instance per
/// (n, L, dealias_fraction) while any field still refers to it.
class Grid {
 public:
  static GridPtr create(int n, double period = 2.0 * std::numbers::pi,
                        double dealias_fraction = 2.0 / 3.0);

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;
  ~Grid();

  int n() const { return n_; }
  double period() const { return period_; }
  double dealias_fraction() const { return dealias_fraction_; }
  /// Largest retained integer index per dimension after dealiasing.
  int dealias_cutoff() const { return cutoff_; }
  double spacing() const { return period_ / n_; }
  double volume() const { return period_ * period_ * period_; }
  double coordinate(int i) const { return period_ * i / n_; }

  std::size_t node_count() const { return nodes_; }
  std::size_t mode_count() const { return modes_; }

  // Per-mode tables, indexed by the flat half-layout mode index.
  double wavenumber(int dim, std::size_t mode) const { return k_[dim][mode]; }
  double k_squared(std::size_t mode) const { return k2_[mode]; }
  int index(int dim, std::size_t mode) const { return idx_[dim][mode]; }
  int max_index(std::size_t mode) const { return max_idx_[mode]; }
  /// 1 or 2: how many modes of the full spectrum the stored mode stands for.
  double parseval_weight(std::size_t mode) const { return weight_[mode]; }
  bool retained(std::size_t mode) const { return retained_[mode] != 0; }
  bool nyquist(std::size_t mode) const { return nyquist_[mode] != 0; }

  /// physical (node_count reals) -> spectral (mode_count), scaled by 1/node_count.
  void forward(const double* physical, Complex* spectral) const;
  /// spectral -> physical; the input is not modified.
  void inverse(const Complex* spectral, double* physical) const;

  bool same_as(const Grid& other) const;

 private:
  Grid(int n, double period, double dealias_fraction);

  int n_;
  double period_;
  double dealias_fraction_;
  int cutoff_;
  std::size_t nodes_;
  std::size_t modes_;
  std::vector<double> k_[3];
  std::vector<int> idx_[3];
  std::vector<double> k2_;
  std::vector<int> max_idx_;
  std::vector<double> weight_;
  std::vector<unsigned char> retained_;
  std::vector<unsigned char> nyquist_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace prestrain
