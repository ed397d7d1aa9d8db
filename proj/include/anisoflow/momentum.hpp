#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/operators.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"
#include "anisoflow/transport.hpp"

namespace anisoflow::momentum {

struct DensityGuard {
  double pos_tol = 1e-8;     // nodal rho below -pos_tol is an error for fractional powers
  double rho_floor = 1e-14;  // clamp for fractional powers
};

/// Raised when a fractional power of a density with negative values is needed.
class NegativeDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// rho^s computed nodally, then dealiased. Integer exponents are evaluated
/// directly; fractional ones use exp(s log max(rho, floor)).
inline ScalarField density_power(const ScalarField& rho, double s, const DensityGuard& guard = {}) {
  const bool integral = s == std::floor(s) && std::abs(s) < 64.0;
  if (!integral) {
    const double m = spectral::min_value(rho);
    if (m < -guard.pos_tol) {
      std::ostringstream os;
      os << "density has negative nodal value " << m << " and exponent " << s
         << " is not an integer";
      throw NegativeDensity(os.str());
    }
  }
  const double floor = guard.rho_floor;
  auto pw = map_nodal(rho, [s, integral, floor](double r) {
    if (integral) return std::pow(r, s);
    return std::exp(s * std::log(std::max(r, floor)));
  });
  return spectral::dealias(pw);
}

/// Right-hand side of -A u = RHS for the regularized momentum equation:
///   -(delta/2)(rho v - mean) - div(rho w (x) v) - grad(w_delta * a rho^gamma)
///   - eps((grad v) grad rho - mean) + w_delta * g,  with w = w_delta * v.
/// Component i of div(rho w (x) v) is sum_j d_j(rho w_j v^i); component i of
/// (grad v) grad rho is sum_j d_j v^i d_j rho.
inline VectorField momentum_rhs(const ScalarField& rho, const VectorField& v,
                                const PhysParams& p, const KernelSpec& /*ker*/, double eps,
                                double delta, const VectorField& g,
                                const DensityGuard& guard = {}) {
  require_same_grid(rho.grid(), v.grid());
  require_same_grid(rho.grid(), g.grid());
  const Grid& grid = rho.grid();
  const auto w = ops::mollify(v, delta);
  const auto grad_rho = spectral::gradient(rho);

  std::array<ScalarField, 3> rho_w{spectral::product(rho, w[0]), spectral::product(rho, w[1]),
                                   spectral::product(rho, w[2])};

  const auto pressure = ops::mollify(p.a * density_power(rho, p.gamma, guard), delta);
  const auto grad_p = spectral::gradient(pressure);
  const auto gw = ops::mollify(g, delta);

  std::array<ScalarField, 3> out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  for (int i = 0; i < 3; ++i) {
    const auto damping = spectral::product(rho, v[i]);

    const VectorField flux(spectral::product(rho_w[0], v[i]), spectral::product(rho_w[1], v[i]),
                           spectral::product(rho_w[2], v[i]));
    const auto convection = spectral::divergence(flux);

    ScalarField cross(grid);
    for (int j = 0; j < 3; ++j) {
      cross = cross + spectral::product(spectral::derivative(v[i], j), grad_rho[j]);
    }

    out[i] = spectral::project_mean_zero(-0.5 * delta * damping - convection - grad_p[i] -
                                         eps * cross + gw[i]);
  }
  return {std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

struct SResult {
  VectorField u;
  ScalarField rho;
  transport::TransportResult transport;
};

/// The velocity map: rho = rho(v) from the transport equation, then u solves
/// -A u = RHS(rho, v) with zero mean.
inline SResult apply_S(const VectorField& v, const PhysParams& p, const KernelSpec& ker,
                       double eps, double delta, const VectorField& g,
                       const transport::TransportConfig& tcfg = {},
                       const DensityGuard& guard = {}) {
  auto tr = transport::solve_transport(v, p, eps, delta, tcfg);
  const auto rhs = momentum_rhs(tr.rho, v, p, ker, eps, delta, g, guard);
  auto u = ops::invert_A(rhs, p, ker);
  ScalarField rho = tr.rho;
  return {std::move(u), std::move(rho), std::move(tr)};
}

}  // namespace anisoflow::momentum
