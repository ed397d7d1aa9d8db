#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/momentum.hpp"
#include "anisoflow/multiplier.hpp"
#include "anisoflow/operators.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/solver.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow::diagnostics {

// ---------------------------------------------------------------------------
// Weak-form pairings against the fixed low-mode basis max|k_i| <= 2.

inline constexpr int test_cutoff = 2;

/// Fourier coefficients of f on the test box (pairings with e^{2 pi i k.x}).
inline std::vector<Complex> test_pairings(const ScalarField& f) {
  const Grid& g = f.grid();
  const int c = std::min(test_cutoff, g.n() / 2 - 1);
  std::vector<Complex> out;
  for (int kz = -c; kz <= c; ++kz)
    for (int ky = -c; ky <= c; ++ky)
      for (int kx = -c; kx <= c; ++kx) out.push_back(f.coefficient({kx, ky, kz}));
  return out;
}

inline double weak_l2(const ScalarField& f) {
  double s = 0.0;
  for (const auto& c : test_pairings(f)) s += std::norm(c);
  return std::sqrt(s);
}

inline double weak_max(const ScalarField& f) {
  double m = 0.0;
  for (const auto& c : test_pairings(f)) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------
// Effective fluxes.

struct Fluxes {
  ScalarField F;               // (2mu+lambda) div u - a rho^gamma
  ScalarField F_an;            // (2mu+lambda) div u - (mean + Delta_theta^{-1} Delta (p - mean))
  ScalarField tilde_F_an;      // mu div_theta u - a rho^gamma
  ScalarField tilde_F_an_gen;  // mu div_theta u + (mu+lambda) div u + xi * div u - a rho^gamma
};

/// Delta_theta^{-1} Delta on the mean-zero part; symbol |k|^2 / (|k|^2 + theta k3^2).
inline ScalarField delta_theta_inverse_delta(const ScalarField& f, const PhysParams& p) {
  return spectral::apply_symbol(f, [&p](const Wavevector& k) {
    const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    if (k2 == 0.0) return Complex(0.0);
    return Complex(k2 / (k2 + p.theta * k[2] * k[2]), 0.0);
  });
}

/// Delta_theta^{-1} on the mean-zero part.
inline ScalarField inverse_delta_theta(const ScalarField& f, const PhysParams& p) {
  return spectral::apply_symbol(f, [&p](const Wavevector& k) {
    const double s = k[0] * k[0] + k[1] * k[1] + (1.0 + p.theta) * k[2] * k[2];
    if (s == 0.0) return Complex(0.0);
    return Complex(-1.0 / (spectral::two_pi * spectral::two_pi * s), 0.0);
  });
}

inline Fluxes effective_fluxes(const ScalarField& rho, const VectorField& u, const PhysParams& p,
                               const KernelSpec& ker, const momentum::DensityGuard& guard = {}) {
  if (!(p.theta > -1.0)) throw std::invalid_argument("effective fluxes need theta > -1");
  const auto pressure = p.a * momentum::density_power(rho, p.gamma, guard);
  const auto div = spectral::divergence(u);
  const auto divth = ops::div_theta(u, p);
  const double pm = pressure.mean();
  const auto fluct = spectral::project_mean_zero(pressure);

  auto F = p.longitudinal() * div - pressure;
  auto F_an = p.longitudinal() * div - ScalarField::constant(rho.grid(), pm) -
              delta_theta_inverse_delta(fluct, p);
  auto tF = p.mu * divth - pressure;
  auto tF_gen = p.mu * divth + (p.mu + p.lambda) * div + ops::convolve(ker.xi, div) - pressure;
  return {std::move(F), std::move(F_an), std::move(tF), std::move(tF_gen)};
}

// ---------------------------------------------------------------------------
// Stability identity, renormalization, commutator.

/// Weak-form defect of
///   (1/(gamma-1)) div(u (Pbar - rho^gamma)) + (Pbar - rho^gamma) div u + Cbar - C(u,u),
/// returned as the largest pairing magnitude over the test basis.
inline double identity_defect(const ScalarField& rho, const VectorField& u,
                              const ScalarField& rho_gamma_bar, const ScalarField& C_bar,
                              const PhysParams& p, const momentum::DensityGuard& guard = {}) {
  require_same_grid(rho.grid(), rho_gamma_bar.grid());
  require_same_grid(rho.grid(), C_bar.grid());
  const auto gap = rho_gamma_bar - momentum::density_power(rho, p.gamma, guard);
  const auto flux = componentwise(u, [&gap](const ScalarField& c) {
    return spectral::product(c, gap);
  });
  const auto defect = (1.0 / (p.gamma - 1.0)) * spectral::divergence(flux) +
                      spectral::product(gap, spectral::divergence(u)) + C_bar -
                      ops::quadratic_form_C(u, p);
  return weak_max(defect);
}

/// div(rho^b u) + (b - 1) rho^b div u, dealiased.
inline ScalarField renorm_defect(const ScalarField& rho, const VectorField& u, double b,
                                 const momentum::DensityGuard& guard = {}) {
  if (!(b > 0.0)) throw std::invalid_argument("renormalization exponent must be positive");
  // b = 1 is linear in rho; keep every mode so the continuity equation is restated exactly.
  const auto rb = b == 1.0 ? rho : momentum::density_power(rho, b, guard);
  const auto flux = componentwise(u, [&rb](const ScalarField& c) {
    return spectral::product(rb, c);
  });
  return spectral::divergence(flux) + (b - 1.0) * spectral::product(rb, spectral::divergence(u));
}

/// Weak-form norm of the renormalized transport defect over the test basis.
/// `u` is the transporting velocity (the mollified one for regularized states).
inline double renorm_residual(const ScalarField& rho, const VectorField& u, double b,
                              const momentum::DensityGuard& guard = {}) {
  return weak_l2(renorm_defect(rho, u, b, guard));
}

/// r_delta(a, b) = d_i(a_delta b) - d_i((a b)_delta), in the discrete L^2 norm.
inline std::map<double, double> commutator_residual(const ScalarField& a, const ScalarField& b,
                                                    const std::vector<double>& deltas,
                                                    int axis = 0) {
  require_same_grid(a.grid(), b.grid());
  if (axis < 0 || axis > 2) throw std::invalid_argument("commutator axis must be 0, 1 or 2");
  const auto ab = spectral::product(a, b);
  std::map<double, double> out;
  for (double d : deltas) {
    const auto r = spectral::derivative(spectral::product(ops::mollify(a, d), b), axis) -
                   spectral::derivative(ops::mollify(ab, d), axis);
    out[d] = spectral::l2_norm(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pressure bootstrap: the mollified pressure P = w_delta * (a rho^gamma) splits as
//   P = T1 + ... + T7 + T_delta,
// with L = mu Delta_theta + (mu+lambda) Delta and
//   T1 = int P, T2 = (2mu+lambda) div u, T3 = m(D)(P - int P),
//   T4 = (2mu+lambda) L^{-1} Delta((eta+xi) * div u), T5 = (2mu+lambda) L^{-1} div(w_delta * g),
//   T6 = -(2mu+lambda) L^{-1} div div(rho w (x) u),
//   T7 = -(2mu+lambda) L^{-1} eps div((grad u) grad rho),
//   T_delta = -(2mu+lambda) L^{-1} (delta/2) div(rho u).

struct BootstrapTerms {
  double alpha = 0.0;
  std::array<double, 7> T{};   // int rho^alpha T_i, i = 1..7
  double T_delta = 0.0;        // int rho^alpha T_delta
  double rho_alpha_gamma = 0.0;  // a int rho^{alpha+gamma}
  double decomposition_residual = 0.0;  // |P - sum T_i - T_delta|_2
  bool t2_nonpositive = false;
  double t3_ratio = 0.0;       // |int rho^alpha T3| / (a int rho^{alpha+gamma})
  double smallness_value = 0.0;
  bool t3_within_smallness = false;  // t3_ratio <= 1.1 smallness_value
};

inline void validate_alpha(double alpha, double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("bootstrap exponent alpha must be positive");
  if (!(2.0 * alpha > gamma)) throw std::invalid_argument("bootstrap exponent needs 2 alpha > gamma");
  if (alpha > 2.0 * gamma - 3.0 + 1e-12) {
    throw std::invalid_argument("bootstrap exponent needs alpha <= 2 gamma - 3");
  }
}

inline BootstrapTerms bootstrap_terms(const ScalarField& rho, const VectorField& u,
                                      const PhysParams& p, const KernelSpec& ker,
                                      const VectorField& g, double eps, double delta,
                                      std::optional<double> alpha_opt = std::nullopt,
                                      const momentum::DensityGuard& guard = {}) {
  const double alpha = alpha_opt.value_or(2.0 * p.gamma - 3.0);
  validate_alpha(alpha, p.gamma);
  const Grid& grid = rho.grid();
  const double c = p.longitudinal();

  // (2mu+lambda) L^{-1}, mean mapped to 0.
  auto solve_L = [&p, c](const ScalarField& f) {
    return spectral::apply_symbol(f, [&p, c](const Wavevector& k) {
      const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
      const double s = p.mu * (k2 + p.theta * k[2] * k[2]) + (p.mu + p.lambda) * k2;
      if (s == 0.0) return Complex(0.0);
      return Complex(-c / (spectral::two_pi * spectral::two_pi * s), 0.0);
    });
  };

  const auto w = ops::mollify(u, delta);
  const auto div = spectral::divergence(u);
  const auto P = ops::mollify(p.a * momentum::density_power(rho, p.gamma, guard), delta);
  const double Pm = P.mean();
  const auto gm = ops::mollify(spectral::project_mean_zero(g), delta);

  std::array<ScalarField, 7> t{
      ScalarField::constant(grid, Pm),
      c * div,
      multiplier::apply_pressure_correction(spectral::project_mean_zero(P), p),
      solve_L(spectral::laplacian(ops::convolve(ker.eta, div) + ops::convolve(ker.xi, div))),
      solve_L(spectral::divergence(gm)),
      ScalarField(grid),
      ScalarField(grid)};

  const auto grad_rho = spectral::gradient(rho);
  ScalarField divdiv(grid);
  ScalarField cross_div(grid);
  for (int i = 0; i < 3; ++i) {
    ScalarField row(grid);
    ScalarField cross(grid);
    for (int j = 0; j < 3; ++j) {
      row = row + spectral::derivative(spectral::product(spectral::product(rho, w[j]), u[i]), j);
      cross = cross + spectral::product(spectral::derivative(u[i], j), grad_rho[j]);
    }
    divdiv = divdiv + spectral::derivative(row, i);
    cross_div = cross_div + spectral::derivative(cross, i);
  }
  t[5] = -1.0 * solve_L(divdiv);
  t[6] = -eps * solve_L(cross_div);

  ScalarField div_rho_u(grid);
  for (int i = 0; i < 3; ++i) {
    div_rho_u = div_rho_u + spectral::derivative(spectral::product(rho, u[i]), i);
  }
  const auto t_delta = -0.5 * delta * solve_L(div_rho_u);

  const auto ra = momentum::density_power(rho, alpha, guard);
  BootstrapTerms out;
  out.alpha = alpha;
  ScalarField sum = t_delta;
  for (int i = 0; i < 7; ++i) {
    out.T[i] = spectral::integral_product(ra, t[i]);
    sum = sum + t[i];
  }
  out.T_delta = spectral::integral_product(ra, t_delta);
  out.decomposition_residual = spectral::l2_norm(P - sum);
  out.rho_alpha_gamma =
      p.a * spectral::integral(momentum::density_power(rho, alpha + p.gamma, guard));
  out.t2_nonpositive = out.T[1] <= 0.0;
  out.t3_ratio = out.rho_alpha_gamma > 0.0 ? std::abs(out.T[2]) / out.rho_alpha_gamma : 0.0;
  out.smallness_value = multiplier::smallness_value(p);
  out.t3_within_smallness = out.t3_ratio <= 1.1 * out.smallness_value;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate report for one state.

struct DiagnosticsReport {
  double mass_error = 0.0;
  double mean_u_error = 0.0;
  double min_rho = 0.0;
  double r_mass = 0.0;
  double r_mom = 0.0;
  solver::EnergyTerms energy{};
  double energy_defect = 0.0;  // relative to the largest term
  ops::CoercivityBounds coercivity{};
  double flux_F_norm = 0.0;
  double flux_Fan_norm = 0.0;
  double flux_tildeFan_norm = 0.0;
  double flux_tildeFan_gen_norm = 0.0;
  std::map<double, double> renorm_residuals;
  std::map<double, double> commutator_residuals;
  BootstrapTerms bootstrap{};
  multiplier::MultiplierReport multiplier{};
  solver::Monitors monitors{};
};

struct DiagnosticsOptions {
  double C = 1.0;
  double c0 = 0.05;
  std::optional<double> alpha{};
  std::vector<double> commutator_deltas{1e-1, 1e-2, 1e-3};
  momentum::DensityGuard guard{};
};

/// Renormalization exponents reported by default: 1, gamma/2 and gamma.
inline std::vector<double> default_renorm_exponents(const PhysParams& p) {
  return {1.0, 0.5 * p.gamma, p.gamma};
}

inline DiagnosticsReport diagnose(const solver::SolverState& s, const PhysParams& p,
                                  const KernelSpec& ker, const VectorField& g,
                                  const DiagnosticsOptions& opt = {}) {
  DiagnosticsReport r;
  r.mass_error = std::abs(s.rho.mean() - p.M);
  const auto um = s.u.mean();
  r.mean_u_error = std::max({std::abs(um[0]), std::abs(um[1]), std::abs(um[2])});
  r.min_rho = spectral::min_value(s.rho);

  const auto res = solver::system_residual(s, p, ker, g, opt.guard);
  r.r_mass = res.r_mass;
  r.r_mom = res.r_mom;
  r.energy = solver::energy_terms(s.rho, s.u, p, ker, s.eps, s.delta, g, opt.guard);
  r.energy_defect = r.energy.relative_defect();
  r.coercivity = ops::coercivity_bounds(s.u, p, ker);

  const auto fl = effective_fluxes(s.rho, s.u, p, ker, opt.guard);
  r.flux_F_norm = spectral::l2_norm(fl.F);
  r.flux_Fan_norm = spectral::l2_norm(fl.F_an);
  r.flux_tildeFan_norm = spectral::l2_norm(fl.tilde_F_an);
  r.flux_tildeFan_gen_norm = spectral::l2_norm(fl.tilde_F_an_gen);

  const auto w = ops::mollify(s.u, s.delta);
  for (double b : default_renorm_exponents(p)) {
    r.renorm_residuals[b] = renorm_residual(s.rho, w, b, opt.guard);
  }
  r.commutator_residuals = commutator_residual(s.rho, s.u[0], opt.commutator_deltas);
  r.bootstrap = bootstrap_terms(s.rho, s.u, p, ker, g, s.eps, s.delta, opt.alpha, opt.guard);
  r.multiplier = multiplier::analyze(p, opt.C, opt.c0);
  r.monitors = solver::monitors(s, p, ker, opt.guard);
  return r;
}

}  // namespace anisoflow::diagnostics
