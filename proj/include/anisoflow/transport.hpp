#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "anisoflow/field.hpp"
#include "anisoflow/operators.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow::transport {

struct TransportConfig {
  double tol = 1e-12;      // absolute discrete L^2 residual
  int max_iter = 500;
  double relax = 1.0;      // initial Richardson damping
  double pos_tol = 1e-8;   // min rho below -pos_tol is flagged
};

struct TransportResult {
  ScalarField rho;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double min_rho = 0.0;
  bool negative = false;   // min rho < -pos_tol
  double final_relax = 1.0;
};

/// L rho = -eps Lap rho + delta rho + div(dealias(rho w)); the mean of the
/// advective part vanishes identically.
inline ScalarField transport_operator(const ScalarField& rho, const VectorField& w, double eps,
                                      double delta) {
  const auto flux = componentwise(w, [&rho](const ScalarField& c) {
    return spectral::product(rho, c);
  });
  return -eps * spectral::laplacian(rho) + delta * rho + spectral::divergence(flux);
}

/// Defect field of -eps Lap rho + delta (rho - M) + div(rho w_delta * v).
inline ScalarField transport_defect(const ScalarField& rho, const VectorField& v,
                                    const PhysParams& p, double eps, double delta) {
  const auto w = ops::mollify(v, delta);
  return transport_operator(rho, w, eps, delta) -
         ScalarField::constant(rho.grid(), delta * p.M);
}

inline double transport_residual(const ScalarField& rho, const VectorField& v,
                                 const PhysParams& p, double eps, double delta) {
  require_same_grid(rho.grid(), v.grid());
  return spectral::l2_norm(transport_defect(rho, v, p, eps, delta));
}

/// Damped preconditioned Richardson iteration
///   rho <- rho - r (-eps Lap + delta)^{-1} R(rho),
/// starting from rho = M (or `initial`). The damping r is halved whenever
/// the residual would increase; the rejected step is discarded.
inline TransportResult solve_transport(const VectorField& v, const PhysParams& p, double eps,
                                       double delta, const TransportConfig& cfg = {},
                                       std::optional<ScalarField> initial = std::nullopt) {
  if (!(eps > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("transport needs eps > 0 and delta > 0");
  }
  const Grid& grid = v.grid();
  const auto w = ops::mollify(v, delta);

  auto precondition = [&](const ScalarField& r) {
    return spectral::apply_symbol(r, [eps, delta](const Wavevector& k) {
      const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
      return Complex(1.0 / (eps * spectral::two_pi * spectral::two_pi * k2 + delta), 0.0);
    });
  };
  auto defect = [&](const ScalarField& rho) {
    return transport_operator(rho, w, eps, delta) - ScalarField::constant(grid, delta * p.M);
  };

  ScalarField rho = ScalarField::constant(grid, p.M);
  if (initial) {
    require_same_grid(initial->grid(), grid);
    // The k = 0 mode of the equation pins the mean to M.
    std::vector<Complex> c(initial->spectral().begin(), initial->spectral().end());
    c[0] = p.M;
    rho = ScalarField::from_spectral(grid, std::move(c));
  }

  TransportResult out{rho};
  auto r = defect(rho);
  double res = spectral::l2_norm(r);
  double relax = cfg.relax;
  int it = 0;
  while (res > cfg.tol && it < cfg.max_iter && relax > 1e-8) {
    ++it;
    auto trial = rho - relax * precondition(r);
    auto r_trial = defect(trial);
    const double res_trial = spectral::l2_norm(r_trial);
    if (!(res_trial < res)) {
      relax *= 0.5;
      continue;
    }
    rho = std::move(trial);
    r = std::move(r_trial);
    res = res_trial;
  }

  out.rho = std::move(rho);
  out.residual = res;
  out.iterations = it;
  out.converged = res <= cfg.tol;
  out.min_rho = spectral::min_value(out.rho);
  out.negative = out.min_rho < -cfg.pos_tol;
  out.final_relax = relax;
  return out;
}

}  // namespace anisoflow::transport
