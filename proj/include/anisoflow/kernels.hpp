#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow {

/// A real, even nonlocal kernel given through its Fourier coefficients.
///
/// Families: `none` (zero kernel), `gaussian(sigma, amplitude)` with
/// hat(k) = amplitude * exp(-2 pi^2 sigma^2 |k|^2) (a periodized Gaussian of
/// integral `amplitude`), and an explicit list of (k, value) entries. Listed
/// entries are mirrored to -k so the kernel is even.
class Kernel {
 public:
  enum class Kind { none, gaussian, modes };

  Kernel() = default;

  static Kernel gaussian(double sigma, double amplitude) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel needs sigma > 0");
    Kernel k;
    k.kind_ = Kind::gaussian;
    k.sigma_ = sigma;
    k.amplitude_ = amplitude;
    return k;
  }

  static Kernel from_modes(std::vector<std::pair<Wavevector, double>> entries) {
    Kernel k;
    k.kind_ = Kind::modes;
    for (const auto& [wv, value] : entries) {
      if (!std::isfinite(value)) throw std::invalid_argument("kernel coefficient is not finite");
      const Wavevector mirror{-wv[0], -wv[1], -wv[2]};
      for (const auto& [other, v] : k.modes_) {
        if ((other == wv || other == mirror) && v != value) {
          std::ostringstream os;
          os << "kernel entries for k=(" << wv[0] << "," << wv[1] << "," << wv[2]
             << ") and its mirror disagree";
          throw std::invalid_argument(os.str());
        }
      }
      k.modes_.emplace_back(wv, value);
    }
    return k;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept {
    if (kind_ == Kind::none) return true;
    if (kind_ == Kind::gaussian) return amplitude_ == 0.0;
    for (const auto& e : modes_) {
      if (e.second != 0.0) return false;
    }
    return true;
  }

  /// Fourier coefficients on the grid lattice, flat-indexed like fields.
  std::vector<double> table(Grid grid) const {
    std::vector<double> hat(grid.size(), 0.0);
    switch (kind_) {
      case Kind::none:
        break;
      case Kind::gaussian: {
        const double c = 2.0 * std::numbers::pi * std::numbers::pi * sigma_ * sigma_;
        for (std::size_t idx = 0; idx < hat.size(); ++idx) {
          const auto k = grid.wavevector(idx);
          hat[idx] = amplitude_ * std::exp(-c * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
        }
        break;
      }
      case Kind::modes: {
        const int half = grid.n() / 2;
        for (const auto& [wv, value] : modes_) {
          for (int c = 0; c < 3; ++c) {
            if (std::abs(wv[c]) >= half) {
              throw std::invalid_argument("kernel mode outside the grid's resolved band");
            }
          }
          hat[grid.flat(wv)] = value;
          hat[grid.flat({-wv[0], -wv[1], -wv[2]})] = value;
        }
        break;
      }
    }
    return hat;
  }

  /// Nodal kernel values reconstructed from the coefficients.
  ScalarField nodal(Grid grid) const {
    auto hat = table(grid);
    std::vector<Complex> coeffs(hat.begin(), hat.end());
    return ScalarField::from_spectral(grid, std::move(coeffs));
  }

  /// L^1 norm by nodal quadrature of the inverse transform.
  double l1_norm(Grid grid) const {
    if (is_zero()) return 0.0;
    return spectral::lp_norm(nodal(grid), 1.0);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::none:
        return "none";
      case Kind::gaussian:
        os << "gaussian(" << sigma_ << ", " << amplitude_ << ")";
        return os.str();
      case Kind::modes:
        os << "modes:";
        for (std::size_t i = 0; i < modes_.size(); ++i) {
          const auto& [wv, v] = modes_[i];
          os << (i ? "; " : " ") << wv[0] << ' ' << wv[1] << ' ' << wv[2] << ' ' << v;
        }
        return os.str();
    }
    return "none";
  }

 private:
  Kind kind_ = Kind::none;
  double sigma_ = 0.0;
  double amplitude_ = 0.0;
  std::vector<std::pair<Wavevector, double>> modes_;
};

/// The pair (eta, xi) of nonlocal viscosity kernels.
struct KernelSpec {
  Kernel eta;
  Kernel xi;
};

/// Gaussian mollifier family, hat(k) = exp(-delta^2 |2 pi k|^2).
/// hat(0) = 1 for every delta, so mollification preserves means exactly.
struct Mollifier {
  static double hat(const Wavevector& k, double delta) {
    const double w2 = spectral::two_pi * spectral::two_pi *
                      static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    return std::exp(-delta * delta * w2);
  }
};

}  // namespace anisoflow
