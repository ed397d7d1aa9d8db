#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "anisoflow/field.hpp"

namespace anisoflow::spectral {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Both representations are always present, so these are the identity on
// valid fields. They exist to keep call sites explicit about intent.
inline const ScalarField& to_spectral(const ScalarField& f) { return f; }
inline const ScalarField& to_nodal(const ScalarField& f) { return f; }

/// Applies a per-mode multiplier: fhat(k) <- symbol(k) * fhat(k).
/// `symbol` receives the signed wavevector.
template <class Symbol>
ScalarField apply_symbol(const ScalarField& f, Symbol&& symbol) {
  const Grid& g = f.grid();
  auto in = f.spectral();
  std::vector<Complex> out(g.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    out[idx] = symbol(g.wavevector(idx)) * in[idx];
  }
  return ScalarField::from_spectral(g, std::move(out));
}

inline double mean(const ScalarField& f) { return f.mean(); }

inline ScalarField project_mean_zero(const ScalarField& f) {
  std::vector<Complex> out(f.spectral().begin(), f.spectral().end());
  out[0] = 0.0;
  return ScalarField::from_spectral(f.grid(), std::move(out));
}

inline VectorField project_mean_zero(const VectorField& u) {
  return componentwise(u, [](const ScalarField& c) { return project_mean_zero(c); });
}

/// 2/3 rule: zero every coefficient with max|k_i| > n/3.
inline ScalarField dealias(const ScalarField& f) {
  const int cut = f.grid().dealias_cutoff();
  return apply_symbol(f, [cut](const Wavevector& k) {
    const bool keep = std::abs(k[0]) <= cut && std::abs(k[1]) <= cut &&
                      std::abs(k[2]) <= cut;
    return keep ? 1.0 : 0.0;
  });
}

inline bool is_band_limited(const ScalarField& f, int cutoff, double tol = 0.0) {
  const Grid& g = f.grid();
  auto s = f.spectral();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto k = g.wavevector(idx);
    if ((std::abs(k[0]) > cutoff || std::abs(k[1]) > cutoff ||
         std::abs(k[2]) > cutoff) &&
        std::abs(s[idx]) > tol) {
      return false;
    }
  }
  return true;
}

/// Nodal product followed by 2/3-rule truncation.
inline ScalarField product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> out(a.grid().size());
  auto na = a.nodal();
  auto nb = b.nodal();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = na[i] * nb[i];
  return dealias(ScalarField::from_nodal(a.grid(), std::move(out)));
}

/// d/dx_axis, symbol 2 pi i k_axis with the Nyquist plane zeroed.
inline ScalarField derivative(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  return apply_symbol(f, [&g, axis](const Wavevector& k) {
    return Complex(0.0, two_pi * g.derivative_wavenumber(k[axis]));
  });
}

/// d^2/dx_axis^2, symbol -(2 pi k_axis)^2 (Nyquist kept).
inline ScalarField second_derivative(const ScalarField& f, int axis) {
  return apply_symbol(f, [axis](const Wavevector& k) {
    const double w = two_pi * k[axis];
    return Complex(-w * w, 0.0);
  });
}

inline ScalarField laplacian(const ScalarField& f) {
  return apply_symbol(f, [](const Wavevector& k) {
    const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    return Complex(-two_pi * two_pi * k2, 0.0);
  });
}

inline VectorField gradient(const ScalarField& f) {
  return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

inline ScalarField divergence(const VectorField& u) {
  const Grid& g = u.grid();
  std::vector<Complex> out(g.size());
  for (int c = 0; c < 3; ++c) {
    auto s = u[c].spectral();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const auto k = g.wavevector(idx);
      out[idx] += Complex(0.0, two_pi * g.derivative_wavenumber(k[c])) * s[idx];
    }
  }
  return ScalarField::from_spectral(g, std::move(out));
}

/// Inverse Laplacian on the mean-zero part (k = 0 mapped to 0).
inline ScalarField inverse_laplacian(const ScalarField& f) {
  return apply_symbol(f, [](const Wavevector& k) {
    const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    return k2 == 0.0 ? Complex(0.0) : Complex(-1.0 / (two_pi * two_pi * k2), 0.0);
  });
}

/// Spectral interpolation / truncation onto another grid.
inline ScalarField resample(const ScalarField& f, Grid target) {
  const Grid& src = f.grid();
  std::vector<Complex> out(target.size());
  const int lim = std::min(src.n(), target.n()) / 2;
  auto s = f.spectral();
  for (std::size_t idx = 0; idx < src.size(); ++idx) {
    const auto k = src.wavevector(idx);
    // Drop the Nyquist plane of the coarser grid: it has no symmetric partner.
    if (std::abs(k[0]) >= lim || std::abs(k[1]) >= lim || std::abs(k[2]) >= lim) continue;
    out[target.flat(k)] = s[idx];
  }
  return ScalarField::from_spectral(target, std::move(out));
}

inline VectorField resample(const VectorField& u, Grid target) {
  return {resample(u[0], target), resample(u[1], target), resample(u[2], target)};
}

// ---------------------------------------------------------------------------
// Integrals and norms on the unit torus (volume 1).

/// int f g dx computed nodally.
inline double integral_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  auto a = f.nodal();
  auto b = g.nodal();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

/// sum_k fhat(k) conj(ghat(k)), real part (Parseval form of int f g).
inline double spectral_inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  auto a = f.spectral();
  auto b = g.spectral();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
  return s;
}

inline double inner(const VectorField& u, const VectorField& v) {
  return spectral_inner(u[0], v[0]) + spectral_inner(u[1], v[1]) +
         spectral_inner(u[2], v[2]);
}

inline double integral(const ScalarField& f) { return f.mean(); }

inline double l2_norm(const ScalarField& f) {
  return std::sqrt(std::max(0.0, spectral_inner(f, f)));
}
inline double l2_norm(const VectorField& u) {
  return std::sqrt(std::max(0.0, inner(u, u)));
}

/// Discrete L^p norm, (mean |f|^p)^(1/p).
inline double lp_norm(const ScalarField& f, double p) {
  double s = 0.0;
  for (double v : f.nodal()) s += std::pow(std::abs(v), p);
  return std::pow(s / static_cast<double>(f.grid().size()), 1.0 / p);
}

/// Discrete L^p norm of the pointwise Euclidean magnitude of a set of fields.
inline double lp_norm_magnitude(std::span<const ScalarField> parts, double p) {
  if (parts.empty()) return 0.0;
  const std::size_t size = parts[0].grid().size();
  double s = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double m2 = 0.0;
    for (const auto& f : parts) m2 += f.nodal()[i] * f.nodal()[i];
    s += std::pow(std::sqrt(m2), p);
  }
  return std::pow(s / static_cast<double>(size), 1.0 / p);
}

inline double lp_norm(const VectorField& u, double p) {
  const std::array<ScalarField, 3> parts{u[0], u[1], u[2]};
  return lp_norm_magnitude(parts, p);
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.nodal()) m = std::max(m, std::abs(v));
  return m;
}

inline double min_value(const ScalarField& f) {
  double m = f.nodal()[0];
  for (double v : f.nodal()) m = std::min(m, v);
  return m;
}

}  // namespace anisoflow::spectral
