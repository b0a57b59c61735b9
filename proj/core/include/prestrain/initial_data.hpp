#pragma once

#include <cstdint>
#include <random>

#include "prestrain/config.hpp"
#include "prestrain/state.hpp"

namespace prestrain {

/// Real field with independent N(0, 1) cosine and sine amplitudes on every
/// wavevector with max-norm index <= band (the mean only if include_mean).
template <int C>
Field<C> random_band_field(const GridPtr& grid, int band, std::mt19937_64& rng, bool include_mean);

/// Seeded band-limited data with ||grad w||_H3 = ||v||_H3 = ||phi||_H3 = amplitude.
DynamicState build_dynamic_initial(const RunConfig& config);

/// Seeded band-limited phi with ||phi||_H2 = amplitude and w = 0 (the
/// elliptic balance is solved by the runner).
QuasiState build_quasi_initial(const RunConfig& config);

/// Unit-L2, mean-zero perturbation direction for twin runs.
ScalarField twin_direction(const RunConfig& config);

GridPtr make_grid(const RunConfig& config);

}  // namespace prestrain
