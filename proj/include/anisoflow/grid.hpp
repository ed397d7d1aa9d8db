#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace anisoflow {

/// Integer wavevector on the lattice {-n/2, ..., n/2-1}^3.
using Wavevector = std::array<int, 3>;

/// Uniform cubic grid on the unit torus [0,1)^3.
///
/// Flat storage order is x fastest, then y, then z, for nodal values and
/// for spectral coefficients alike (FFT index p maps to wavenumber p or p-n).
class Grid {
 public:
  explicit Grid(int n) : n_(n) {
    if (n < 4 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("grid size must be a power of two >= 4, got " +
                                  std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  double spacing() const noexcept { return 1.0 / n_; }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(n_) * k);
  }

  /// Signed wavenumber of FFT index p.
  int wavenumber(int p) const noexcept { return p < n_ / 2 ? p : p - n_; }

  /// FFT index of signed wavenumber k (any integer, wrapped).
  int fft_index(int k) const noexcept { return ((k % n_) + n_) % n_; }

  Wavevector wavevector(std::size_t flat) const noexcept {
    const int i = static_cast<int>(flat % n_);
    const int j = static_cast<int>((flat / n_) % n_);
    const int k = static_cast<int>(flat / (static_cast<std::size_t>(n_) * n_));
    return {wavenumber(i), wavenumber(j), wavenumber(k)};
  }

  std::size_t flat(const Wavevector& k) const noexcept {
    return index(fft_index(k[0]), fft_index(k[1]), fft_index(k[2]));
  }

  bool is_nyquist(int k) const noexcept { return k == -n_ / 2; }

  /// Wavenumber used by first-order derivatives: zero on the Nyquist plane.
  int derivative_wavenumber(int k) const noexcept {
    return is_nyquist(k) ? 0 : k;
  }

  /// Largest retained |k_i| under the 2/3 rule.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  /// Node coordinate along one axis.
  double coord(int i) const noexcept { return static_cast<double>(i) / n_; }

  bool operator==(const Grid&) const = default;

 private:
  int n_;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) {
    throw std::invalid_argument("fields live on different grids (n=" +
                                std::to_string(a.n()) + " vs n=" +
                                std::to_string(b.n()) + ")");
  }
}

}  // namespace anisoflow
