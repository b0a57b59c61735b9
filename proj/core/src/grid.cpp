#include "prestrain/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace prestrain {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

unsigned planner_flags() {
  if (const char* env = std::getenv("PRESTRAIN_LAB_FFTW_ESTIMATE")) {
    if (std::string(env) == "1") return FFTW_ESTIMATE;
  }
  return FFTW_MEASURE;
}

ComplexBuffer& scratch(std::size_t size) {
  thread_local ComplexBuffer buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

}  // namespace

GridPtr Grid::create(int n, double period, double dealias_fraction) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("grid: n must be an even integer >= 2, got " +
                                std::to_string(n));
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("grid: period must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw std::invalid_argument("grid: dealias_fraction must lie in (0, 1]");
  if (static_cast<int>(std::floor(dealias_fraction * n / 2.0)) < 1)
    throw std::invalid_argument("grid: dealias band retains no modes");

  using Key = std::tuple<int, double, double>;
  static std::mutex cache_mutex;
  static std::map<Key, std::weak_ptr<const Grid>> cache;

  std::lock_guard lock(cache_mutex);
  const Key key{n, period, dealias_fraction};
  if (auto it = cache.find(key); it != cache.end()) {
    if (auto alive = it->second.lock()) return alive;
  }
  GridPtr grid(new Grid(n, period, dealias_fraction));
  cache[key] = grid;
  return grid;
}

Grid::Grid(int n, double period, double dealias_fraction)
    : n_(n),
      period_(period),
      dealias_fraction_(dealias_fraction),
      cutoff_(std::min(static_cast<int>(std::floor(dealias_fraction * n / 2.0)), n / 2 - 1)),
      nodes_(static_cast<std::size_t>(n) * n * n),
      modes_(static_cast<std::size_t>(n) * n * (n / 2 + 1)) {
  // A grid of n = 2 has no modes other than the mean and Nyquist; keep cutoff >= 0.
  cutoff_ = std::max(cutoff_, 0);
  const int half = n / 2 + 1;
  const double base = 2.0 * std::numbers::pi / period;
  for (int d = 0; d < 3; ++d) {
    k_[d].resize(modes_);
    idx_[d].resize(modes_);
  }
  k2_.resize(modes_);
  max_idx_.resize(modes_);
  weight_.resize(modes_);
  retained_.resize(modes_);
  nyquist_.resize(modes_);

  auto signed_index = [n](int i) { return i <= n / 2 ? i : i - n; };
  std::size_t m = 0;
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < half; ++i2, ++m) {
        const int idx[3] = {signed_index(i0), signed_index(i1), i2};
        double k2 = 0.0;
        int maxabs = 0;
        bool nyq = false;
        for (int d = 0; d < 3; ++d) {
          idx_[d][m] = idx[d];
          k_[d][m] = base * idx[d];
          k2 += k_[d][m] * k_[d][m];
          maxabs = std::max(maxabs, std::abs(idx[d]));
          nyq = nyq || std::abs(idx[d]) == n / 2;
        }
        k2_[m] = k2;
        max_idx_[m] = maxabs;
        nyquist_[m] = nyq;
        weight_[m] = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
        retained_[m] = !nyq && maxabs <= cutoff_;
      }
    }
  }

  RealBuffer real(nodes_);
  ComplexBuffer spec(modes_);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = planner_flags();
  forward_plan_ = fftw_plan_dft_r2c_3d(n, n, n, real.data(),
                                       reinterpret_cast<fftw_complex*>(spec.data()), flags);
  inverse_plan_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(spec.data()),
                                       real.data(), flags);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("grid: FFTW planning failed");
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Grid::forward(const double* physical, Complex* spectral) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(physical),
                       reinterpret_cast<fftw_complex*>(spectral));
  const double scale = 1.0 / static_cast<double>(nodes_);
  for (std::size_t m = 0; m < modes_; ++m) spectral[m] *= scale;
}

void Grid::inverse(const Complex* spectral, double* physical) const {
  // c2r overwrites its input, so transform a copy.
  auto& work = scratch(modes_);
  std::copy(spectral, spectral + modes_, work.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(work.data()), physical);
}

bool Grid::same_as(const Grid& other) const {
  return this == &other || (n_ == other.n_ && period_ == other.period_ &&
                            dealias_fraction_ == other.dealias_fraction_);
}

}  // namespace prestrain
