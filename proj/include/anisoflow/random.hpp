#pragma once

#include <cmath>
#include <cstdint>

#include "anisoflow/field.hpp"

namespace anisoflow {

/// Counter-based generator: the i-th draw depends only on (seed, stream, i),
/// so results do not depend on call order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ull);
  }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t key_;
};

/// Random real trigonometric polynomial with modes max|k_i| <= cutoff.
/// Coefficients are uniform in the unit square scaled by `amplitude`.
inline ScalarField random_trig_field(Grid grid, int cutoff, std::uint64_t seed,
                                     std::uint64_t stream = 0,
                                     double amplitude = 1.0,
                                     bool mean_zero = false) {
  CounterRng rng(seed, stream);
  std::vector<Complex> coeffs(grid.size());
  std::uint64_t counter = 0;
  for (int kz = -cutoff; kz <= cutoff; ++kz)
    for (int ky = -cutoff; ky <= cutoff; ++ky)
      for (int kx = -cutoff; kx <= cutoff; ++kx) {
        const double re = rng.uniform(counter++, -1.0, 1.0);
        const double im = rng.uniform(counter++, -1.0, 1.0);
        coeffs[grid.flat({kx, ky, kz})] = amplitude * Complex(re, im);
      }
  if (mean_zero) coeffs[0] = 0.0;
  return ScalarField::from_spectral(grid, std::move(coeffs));
}

inline VectorField random_trig_vector(Grid grid, int cutoff, std::uint64_t seed,
                                      double amplitude = 1.0,
                                      bool mean_zero = true) {
  return {random_trig_field(grid, cutoff, seed, 1, amplitude, mean_zero),
          random_trig_field(grid, cutoff, seed, 2, amplitude, mean_zero),
          random_trig_field(grid, cutoff, seed, 3, amplitude, mean_zero)};
}

/// Random nodal values uniform in [-1, 1) (not band-limited).
inline ScalarField random_nodal_field(Grid grid, std::uint64_t seed,
                                      std::uint64_t stream = 0) {
  CounterRng rng(seed, stream);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(i, -1.0, 1.0);
  return ScalarField::from_nodal(grid, std::move(v));
}

}  // namespace anisoflow
