#pragma once

#include <algorithm>

namespace anisoflow {

/// Physical constants of the stationary system.
///
/// Admissible values satisfy mu > 0, mu + lambda > 0, theta > -1, gamma > 3,
/// a > 0 and M > 0; admissibility is checked by hypothesis::check, not here,
/// so that inadmissible sets can still be described and reported.
struct PhysParams {
  double mu = 1.0;      // shear viscosity
  double lambda = 1.0;  // bulk-related constant
  double theta = 0.0;   // vertical anisotropy amplitude
  double a = 1.0;       // pressure constant, p = a rho^gamma
  double gamma = 4.0;   // adiabatic exponent
  double M = 1.0;       // total mass

  double min_shear() const noexcept { return std::min(1.0, 1.0 + theta) * mu; }
  double longitudinal() const noexcept { return 2.0 * mu + lambda; }
};

}  // namespace anisoflow
