#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow::hypothesis {

struct Condition {
  std::string name;
  bool passed = false;
  double value = 0.0;  // the quantity the condition was decided on
  std::string detail;
};

enum class KernelAlternative { none, small_l1, nonnegative, both };

inline const char* to_string(KernelAlternative a) {
  switch (a) {
    case KernelAlternative::small_l1: return "small_l1";
    case KernelAlternative::nonnegative: return "nonnegative";
    case KernelAlternative::both: return "both";
    case KernelAlternative::none: break;
  }
  return "none";
}

struct Report {
  std::vector<Condition> conditions;
  KernelAlternative alternative = KernelAlternative::none;
  double eta_l1 = 0.0;
  double xi_l1 = 0.0;
  double small_l1_margin = 0.0;  // min{1,1+theta}mu - |eta|_1 - |xi|_1/3
  double forcing_exponent = 0.0;
  double forcing_norm = 0.0;

  bool passed() const {
    for (const auto& c : conditions) {
      if (!c.passed) return false;
    }
    return true;
  }
  /// Names of the failed conditions, comma separated.
  std::string failures() const {
    std::string s;
    for (const auto& c : conditions) {
      if (c.passed) continue;
      if (!s.empty()) s += ", ";
      s += c.name;
    }
    return s;
  }
};

namespace detail {

inline bool nonnegative(const std::vector<double>& hat) {
  for (double v : hat) {
    if (v < 0.0) return false;
  }
  return true;
}

/// sum_k 4 pi^2 |k|^2 |hat(k)|^2, the discrete surrogate of |grad kernel|_2^2.
inline double gradient_energy(Grid grid, const std::vector<double>& hat) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    const auto k = grid.wavevector(idx);
    s += spectral::two_pi * spectral::two_pi * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) *
         hat[idx] * hat[idx];
  }
  return s;
}

}  // namespace detail

/// Evaluates every bullet of the structural hypothesis. Never throws on
/// inadmissible values; each failing bullet is reported by name.
inline Report check_hypothesis_H(const PhysParams& p, const KernelSpec& ker,
                                 const VectorField& g) {
  Report r;
  auto add = [&r](std::string name, bool ok, double value, std::string detail) {
    r.conditions.push_back({std::move(name), ok, value, std::move(detail)});
  };

  add("M", p.M > 0.0, p.M, "total mass M > 0");
  add("gamma", p.gamma > 3.0, p.gamma, "adiabatic constant gamma > 3");
  add("a", p.a > 0.0, p.a, "pressure constant a > 0");
  add("mu", p.mu > 0.0, p.mu, "mu > 0");
  add("mu_plus_lambda", p.mu + p.lambda > 0.0, p.mu + p.lambda, "mu + lambda > 0");
  add("theta", p.theta > -1.0, p.theta, "theta > -1");

  const auto gm = g.mean();
  const double g_mean = std::sqrt(gm[0] * gm[0] + gm[1] * gm[1] + gm[2] * gm[2]);
  add("forcing_mean", g_mean <= 1e-12 * (1.0 + spectral::l2_norm(g)), g_mean,
      "forcing has zero mean");

  r.forcing_exponent = 3.0 * (p.gamma - 1.0) / (2.0 * p.gamma - 1.0);
  r.forcing_norm = r.forcing_exponent > 0.0 ? spectral::lp_norm(g, r.forcing_exponent)
                                            : std::numeric_limits<double>::quiet_NaN();
  add("forcing_norm", std::isfinite(r.forcing_norm), r.forcing_norm,
      "forcing has a finite L^{3(gamma-1)/(2gamma-1)} norm");

  const Grid& grid = g.grid();
  const auto eta = ker.eta.table(grid);
  const auto xi = ker.xi.table(grid);
  r.eta_l1 = ker.eta.l1_norm(grid);
  r.xi_l1 = ker.xi.l1_norm(grid);
  r.small_l1_margin = p.min_shear() - r.eta_l1 - r.xi_l1 / 3.0;
  const bool alt_i = r.small_l1_margin > 0.0;
  const bool alt_ii = detail::nonnegative(eta) && detail::nonnegative(xi);
  r.alternative = alt_i && alt_ii ? KernelAlternative::both
                  : alt_i         ? KernelAlternative::small_l1
                  : alt_ii        ? KernelAlternative::nonnegative
                                  : KernelAlternative::none;
  add("kernels", alt_i || alt_ii, r.small_l1_margin,
      "small L^1 kernels or nonnegative kernel coefficients");

  const double grad_energy =
      detail::gradient_energy(grid, eta) + detail::gradient_energy(grid, xi);
  add("kernel_gradients", std::isfinite(grad_energy), grad_energy,
      "kernel gradients are square integrable");
  return r;
}

}  // namespace anisoflow::hypothesis
