#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "anisoflow/fft.hpp"
#include "anisoflow/grid.hpp"

namespace anisoflow {

using Complex = std::complex<double>;

/// Real periodic scalar field carried in nodal and spectral form.
///
/// Spectral coefficients use the normalization
///   f(x) = sum_k fhat(k) exp(2 pi i k.x),  fhat(0) = mean(f),
/// and are kept conjugate-symmetric. Both forms are always present and
/// transform-consistent; instances are immutable once built.
class ScalarField {
 public:
  explicit ScalarField(Grid grid)
      : grid_(grid), nodal_(grid.size(), 0.0), spectral_(grid.size()) {}

  static ScalarField from_nodal(Grid grid, std::vector<double> values) {
    if (values.size() != grid.size()) {
      throw std::invalid_argument("nodal array size does not match grid");
    }
    ScalarField f(grid, std::move(values), {});
    std::vector<Complex> work(f.nodal_.begin(), f.nodal_.end());
    f.spectral_.resize(grid.size());
    detail::plan_for(grid.n()).forward(work, f.spectral_);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : f.spectral_) c *= scale;
    return f;
  }

  /// Builds a field from coefficients; the Hermitian part is kept so the
  /// nodal form is real.
  static ScalarField from_spectral(Grid grid, std::vector<Complex> coeffs) {
    if (coeffs.size() != grid.size()) {
      throw std::invalid_argument("spectral array size does not match grid");
    }
    std::vector<Complex> sym(coeffs.size());
    for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
      const auto k = grid.wavevector(idx);
      const auto mirror = grid.flat({-k[0], -k[1], -k[2]});
      sym[idx] = 0.5 * (coeffs[idx] + std::conj(coeffs[mirror]));
    }
    std::vector<Complex> work(grid.size());
    detail::plan_for(grid.n()).backward(sym, work);
    std::vector<double> values(grid.size());
    std::transform(work.begin(), work.end(), values.begin(),
                   [](const Complex& c) { return c.real(); });
    return ScalarField(grid, std::move(values), std::move(sym));
  }

  /// Restores a field from both stored forms without transforming, so a
  /// dumped field reloads bit for bit. The caller vouches for consistency.
  static ScalarField from_parts(Grid grid, std::vector<double> values, std::vector<Complex> coeffs) {
    if (values.size() != grid.size() || coeffs.size() != grid.size()) {
      throw std::invalid_argument("stored array size does not match grid");
    }
    return ScalarField(grid, std::move(values), std::move(coeffs));
  }

  static ScalarField constant(Grid grid, double c) {
    std::vector<Complex> coeffs(grid.size());
    coeffs[0] = c;
    return ScalarField(grid, std::vector<double>(grid.size(), c),
                       std::move(coeffs));
  }

  /// Samples f(x, y, z) at the nodes.
  template <class Fn>
  static ScalarField sample(Grid grid, Fn&& fn) {
    std::vector<double> values(grid.size());
    const int n = grid.n();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          values[grid.index(i, j, k)] =
              fn(grid.coord(i), grid.coord(j), grid.coord(k));
    return from_nodal(grid, std::move(values));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> nodal() const noexcept { return nodal_; }
  std::span<const Complex> spectral() const noexcept { return spectral_; }

  double mean() const noexcept { return spectral_[0].real(); }
  Complex coefficient(const Wavevector& k) const {
    return spectral_[grid_.flat(k)];
  }

 private:
  ScalarField(Grid grid, std::vector<double> nodal, std::vector<Complex> spec)
      : grid_(grid), nodal_(std::move(nodal)), spectral_(std::move(spec)) {}

  Grid grid_;
  std::vector<double> nodal_;
  std::vector<Complex> spectral_;
};

/// Three scalar components (u^1, u^2, u^3) on one grid.
class VectorField {
 public:
  explicit VectorField(Grid grid)
      : components_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}
  VectorField(ScalarField a, ScalarField b, ScalarField c)
      : components_{std::move(a), std::move(b), std::move(c)} {
    require_same_grid(components_[0].grid(), components_[1].grid());
    require_same_grid(components_[0].grid(), components_[2].grid());
  }

  const Grid& grid() const noexcept { return components_[0].grid(); }
  const ScalarField& operator[](int i) const { return components_.at(i); }

  std::array<double, 3> mean() const noexcept {
    return {components_[0].mean(), components_[1].mean(),
            components_[2].mean()};
  }
  bool is_mean_zero() const noexcept {
    return components_[0].mean() == 0.0 && components_[1].mean() == 0.0 &&
           components_[2].mean() == 0.0;
  }

 private:
  std::array<ScalarField, 3> components_;
};

// ---------------------------------------------------------------------------
// Pointwise arithmetic. Linear combinations are done in spectral space and
// the nodal side is rebuilt, so results stay transform-consistent.

namespace detail {
template <class Op>
ScalarField combine_spectral(const ScalarField& a, const ScalarField& b,
                             Op op) {
  require_same_grid(a.grid(), b.grid());
  std::vector<Complex> out(a.grid().size());
  auto sa = a.spectral();
  auto sb = b.spectral();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(sa[i], sb[i]);
  return ScalarField::from_spectral(a.grid(), std::move(out));
}
}  // namespace detail

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return detail::combine_spectral(a, b, std::plus<>{});
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return detail::combine_spectral(a, b, std::minus<>{});
}
inline ScalarField operator*(double s, const ScalarField& a) {
  std::vector<Complex> out(a.spectral().begin(), a.spectral().end());
  for (auto& c : out) c *= s;
  return ScalarField::from_spectral(a.grid(), std::move(out));
}
inline ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline VectorField operator*(double s, const VectorField& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

/// Applies a scalar function to every component.
template <class Fn>
VectorField componentwise(const VectorField& u, Fn&& fn) {
  return {fn(u[0]), fn(u[1]), fn(u[2])};
}

/// Pointwise map of nodal values (no dealiasing).
template <class Fn>
ScalarField map_nodal(const ScalarField& f, Fn&& fn) {
  std::vector<double> out(f.nodal().begin(), f.nodal().end());
  for (auto& v : out) v = fn(v);
  return ScalarField::from_nodal(f.grid(), std::move(out));
}

}  // namespace anisoflow
