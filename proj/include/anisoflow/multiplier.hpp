#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow::multiplier {

/// m(k) = theta mu k3^2 / [(2mu+lambda)(k1^2+k2^2) + ((2+theta)mu+lambda) k3^2],
/// the symbol of Id - (2mu+lambda)(mu Delta_theta + (mu+lambda) Delta)^{-1} Delta.
inline double eval_m(const Wavevector& k, const PhysParams& p) {
  if (k[0] == 0 && k[1] == 0 && k[2] == 0) {
    throw std::invalid_argument("multiplier m is undefined at k = 0");
  }
  const double h = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
  const double v = static_cast<double>(k[2]) * k[2];
  const double den = p.longitudinal() * h + ((2.0 + p.theta) * p.mu + p.lambda) * v;
  if (!(den > 0.0)) throw std::domain_error("multiplier denominator is not positive");
  return p.theta * p.mu * v / den;
}

/// sup over k != 0 of |m(k)|, attained on the vertical axis.
inline double sup_abs_m(const PhysParams& p) {
  return std::abs(p.theta) * p.mu / ((2.0 + p.theta) * p.mu + p.lambda);
}

struct MihlinConstants {
  double A0 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double overall() const noexcept { return std::max({A0, A1, A2}); }
};

/// Closed-form Mihlin constants of 1 / (a1 xi1^2 + a2 xi2^2 + a3 xi3^2) xi3^2.
inline MihlinConstants mihlin_constants(double a1, double a2, double a3) {
  if (!(a1 > 0.0) || !(a2 > 0.0) || !(a3 > 0.0)) {
    throw std::invalid_argument("Mihlin constants need positive coefficients");
  }
  const double amin = std::min({a1, a2, a3});
  MihlinConstants c;
  c.A0 = 1.0 / a3;
  c.A1 = std::max({std::sqrt(a1) / a3, std::sqrt(a2) / a3, 1.0 / std::sqrt(a3)}) / std::sqrt(amin);
  c.A2 = std::max({a1 / a3, a2 / a3, 1.0}) / amin;
  return c;
}

/// Multiplies each nonzero mode by m(k); the mean stays zero.
inline ScalarField apply_pressure_correction(const ScalarField& f, const PhysParams& p) {
  const double scale = 1.0 + spectral::l2_norm(f);
  if (std::abs(f.mean()) > 1e-10 * scale) {
    throw std::invalid_argument("pressure correction acts on mean-zero fields");
  }
  return spectral::apply_symbol(f, [&p](const Wavevector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return Complex(0.0);
    return Complex(eval_m(k, p), 0.0);
  });
}

/// (1+|theta|) |theta| mu |2 lambda + mu| / (lambda + mu)^2.
inline double smallness_value(const PhysParams& p) {
  const double t = std::abs(p.theta);
  const double s = p.lambda + p.mu;
  return (1.0 + t) * t * p.mu * std::abs(2.0 * p.lambda + p.mu) / (s * s);
}

inline double norm_bound(const PhysParams& p, double C) { return C * smallness_value(p); }

inline bool check_smallness(const PhysParams& p, double c0) { return smallness_value(p) <= c0; }

struct MultiplierReport {
  double sup_abs_m = 0.0;
  double mihlin_A0 = 0.0;
  double mihlin_A1 = 0.0;
  double mihlin_A2 = 0.0;
  double norm_bound_value = 0.0;
  double smallness_value = 0.0;
  double c0 = 0.05;
  bool passes_smallness = false;
};

/// Mihlin constants are those of the denominator coefficients
/// (2mu+lambda, 2mu+lambda, (2+theta)mu+lambda).
inline MultiplierReport analyze(const PhysParams& p, double C = 1.0, double c0 = 0.05) {
  MultiplierReport r;
  r.sup_abs_m = sup_abs_m(p);
  const double a12 = p.longitudinal();
  const double a3 = (2.0 + p.theta) * p.mu + p.lambda;
  if (a12 > 0.0 && a3 > 0.0) {
    const auto mc = mihlin_constants(a12, a12, a3);
    r.mihlin_A0 = mc.A0;
    r.mihlin_A1 = mc.A1;
    r.mihlin_A2 = mc.A2;
  }
  r.norm_bound_value = norm_bound(p, C);
  r.smallness_value = smallness_value(p);
  r.c0 = c0;
  r.passes_smallness = r.smallness_value <= c0;
  return r;
}

/// max |m(k)| over the nonzero modes of a grid lattice.
inline double lattice_sup(Grid grid, const PhysParams& p) {
  double s = 0.0;
  for (std::size_t idx = 1; idx < grid.size(); ++idx) {
    s = std::max(s, std::abs(eval_m(grid.wavevector(idx), p)));
  }
  return s;
}

}  // namespace anisoflow::multiplier
