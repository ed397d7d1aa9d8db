#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"

namespace anisoflow::ops {

using spectral::two_pi;

/// Raised when the 3x3 symbol of A cannot be inverted at some mode, which
/// means the operator is not coercive for the given parameters.
class SingularSymbol : public std::runtime_error {
 public:
  SingularSymbol(const Wavevector& k, const std::string& what)
      : std::runtime_error(what), mode_(k) {}
  const Wavevector& mode() const noexcept { return mode_; }

 private:
  Wavevector mode_;
};

// ---------------------------------------------------------------------------
// Anisotropic building blocks.

/// Delta_theta = Delta + theta d_33, symbol -4 pi^2 (k1^2 + k2^2 + (1+theta) k3^2).
inline ScalarField apply_delta_theta(const ScalarField& f, const PhysParams& p) {
  return spectral::apply_symbol(f, [&p](const Wavevector& k) {
    const double s = k[0] * k[0] + k[1] * k[1] + (1.0 + p.theta) * k[2] * k[2];
    return Complex(-two_pi * two_pi * s, 0.0);
  });
}

inline VectorField apply_delta_theta(const VectorField& u, const PhysParams& p) {
  return componentwise(u, [&p](const ScalarField& c) { return apply_delta_theta(c, p); });
}

/// grad_theta = (d_1, d_2, sqrt(1+theta) d_3).
inline VectorField grad_theta(const ScalarField& f, const PhysParams& p) {
  if (!(p.theta > -1.0)) throw std::invalid_argument("grad_theta needs theta > -1");
  return {spectral::derivative(f, 0), spectral::derivative(f, 1),
          std::sqrt(1.0 + p.theta) * spectral::derivative(f, 2)};
}

/// div_theta u = d_1 u^1 + d_2 u^2 + (1+theta) d_3 u^3.
inline ScalarField div_theta(const VectorField& u, const PhysParams& p) {
  return spectral::derivative(u[0], 0) + spectral::derivative(u[1], 1) +
         (1.0 + p.theta) * spectral::derivative(u[2], 2);
}

// ---------------------------------------------------------------------------
// Convolutions.

inline ScalarField convolve(std::span<const double> hat, const ScalarField& f) {
  const Grid& g = f.grid();
  if (hat.size() != g.size()) throw std::invalid_argument("kernel table does not match grid");
  auto in = f.spectral();
  std::vector<Complex> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = hat[i] * in[i];
  return ScalarField::from_spectral(g, std::move(out));
}

inline ScalarField convolve(const Kernel& kernel, const ScalarField& f) {
  return convolve(kernel.table(f.grid()), f);
}

inline VectorField convolve(const Kernel& kernel, const VectorField& u) {
  const auto hat = kernel.table(u.grid());
  return componentwise(u, [&hat](const ScalarField& c) { return convolve(hat, c); });
}

inline ScalarField mollify(const ScalarField& f, double delta) {
  return spectral::apply_symbol(
      f, [delta](const Wavevector& k) { return Complex(Mollifier::hat(k, delta), 0.0); });
}

inline VectorField mollify(const VectorField& u, double delta) {
  return componentwise(u, [delta](const ScalarField& c) { return mollify(c, delta); });
}

// ---------------------------------------------------------------------------
// The viscous operator
//   A u = mu Delta_theta u + (mu+lambda) grad div u + eta * Delta u + xi * grad div u.
//
// Per mode, -A has the symbol 4 pi^2 [alpha(k) I + beta(k) kd kd^T] with
//   alpha = mu (|k|^2 + theta k3^2) + eta_hat |k|^2,  beta = mu + lambda + xi_hat,
// where kd is the derivative wavevector (Nyquist components zeroed).

namespace detail {

struct ModeSymbol {
  double alpha;
  double beta;
  std::array<double, 3> kd;
};

class SymbolTable {
 public:
  SymbolTable(Grid grid, const PhysParams& p, const KernelSpec& ker)
      : grid_(grid), eta_(ker.eta.table(grid)), xi_(ker.xi.table(grid)), p_(p) {}

  ModeSymbol at(std::size_t idx) const {
    const auto k = grid_.wavevector(idx);
    const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    ModeSymbol s;
    s.alpha = p_.mu * (k2 + p_.theta * k[2] * k[2]) + eta_[idx] * k2;
    s.beta = p_.mu + p_.lambda + xi_[idx];
    for (int c = 0; c < 3; ++c) s.kd[c] = grid_.derivative_wavenumber(k[c]);
    return s;
  }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  std::vector<double> eta_;
  std::vector<double> xi_;
  PhysParams p_;
};

inline std::array<std::vector<Complex>, 3> spectra(const VectorField& u) {
  std::array<std::vector<Complex>, 3> s;
  for (int c = 0; c < 3; ++c) s[c].assign(u[c].spectral().begin(), u[c].spectral().end());
  return s;
}

inline VectorField from_spectra(Grid g, std::array<std::vector<Complex>, 3> s) {
  return {ScalarField::from_spectral(g, std::move(s[0])),
          ScalarField::from_spectral(g, std::move(s[1])),
          ScalarField::from_spectral(g, std::move(s[2]))};
}

}  // namespace detail

inline VectorField apply_A(const VectorField& u, const PhysParams& p, const KernelSpec& ker) {
  const Grid& g = u.grid();
  const detail::SymbolTable table(g, p, ker);
  auto in = detail::spectra(u);
  std::array<std::vector<Complex>, 3> out;
  for (auto& o : out) o.resize(g.size());
  const double c = -two_pi * two_pi;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto s = table.at(idx);
    const Complex kdu = s.kd[0] * in[0][idx] + s.kd[1] * in[1][idx] + s.kd[2] * in[2][idx];
    for (int i = 0; i < 3; ++i) out[i][idx] = c * (s.alpha * in[i][idx] + s.beta * s.kd[i] * kdu);
  }
  return detail::from_spectra(g, std::move(out));
}

/// Solves -A w = f on mean-zero fields, mode by mode (Sherman-Morrison on
/// alpha I + beta kd kd^T). Throws SingularSymbol naming the offending mode.
inline VectorField invert_A(const VectorField& f, const PhysParams& p, const KernelSpec& ker) {
  const Grid& g = f.grid();
  const auto m = f.mean();
  const double scale = 1.0 + spectral::l2_norm(f);
  for (double v : m) {
    if (std::abs(v) > 1e-10 * scale) {
      throw std::invalid_argument("invert_A needs a mean-zero right-hand side");
    }
  }
  const detail::SymbolTable table(g, p, ker);
  auto in = detail::spectra(f);
  std::array<std::vector<Complex>, 3> out;
  for (auto& o : out) o.assign(g.size(), Complex(0.0));
  const double c = 1.0 / (two_pi * two_pi);
  for (std::size_t idx = 1; idx < g.size(); ++idx) {
    const auto s = table.at(idx);
    const double kd2 = s.kd[0] * s.kd[0] + s.kd[1] * s.kd[1] + s.kd[2] * s.kd[2];
    const double longitudinal = s.alpha + s.beta * kd2;
    // alpha >= 0 is a scale for |k|^2; compare against the shear scale.
    const double ref = std::abs(p.mu) * (1.0 + kd2) + 1e-300;
    if (!(s.alpha > 1e-12 * ref) || !(longitudinal > 1e-12 * ref)) {
      const auto k = g.wavevector(idx);
      std::ostringstream os;
      os << "symbol of A is not positive definite at k=(" << k[0] << "," << k[1] << ","
         << k[2] << "): alpha=" << s.alpha << ", alpha+beta|k|^2=" << longitudinal;
      throw SingularSymbol(k, os.str());
    }
    const Complex kdf = s.kd[0] * in[0][idx] + s.kd[1] * in[1][idx] + s.kd[2] * in[2][idx];
    const double ratio = s.beta / longitudinal;
    for (int i = 0; i < 3; ++i) {
      out[i][idx] = c * (in[i][idx] - ratio * s.kd[i] * kdf) / s.alpha;
    }
  }
  return detail::from_spectra(g, std::move(out));
}

/// -int <A u, u> evaluated in Fourier space.
inline double dissipation(const VectorField& u, const PhysParams& p, const KernelSpec& ker) {
  return -spectral::inner(apply_A(u, p, ker), u);
}

// ---------------------------------------------------------------------------
// Quadratic forms. Products are dealiased, so for band-limited u with
// max|k_i| <= n/3 the pointwise identity <A u, u> = B(u,u) - C(u,u) is exact.

inline ScalarField quadratic_form_C(const VectorField& u, const PhysParams& p) {
  const Grid& g = u.grid();
  ScalarField grad_sq(g);
  for (int i = 0; i < 3; ++i) {
    const auto gi = grad_theta(u[i], p);
    for (int j = 0; j < 3; ++j) grad_sq = grad_sq + spectral::product(gi[j], gi[j]);
  }
  const auto div = spectral::divergence(u);
  return p.mu * grad_sq + (p.mu + p.lambda) * spectral::product(div, div);
}

inline ScalarField quadratic_form_B(const VectorField& u, const PhysParams& p,
                                    const KernelSpec& ker) {
  const Grid& g = u.grid();
  const auto div = spectral::divergence(u);

  ScalarField u_sq(g);
  for (int i = 0; i < 3; ++i) u_sq = u_sq + spectral::product(u[i], u[i]);
  auto b = 0.5 * p.mu * apply_delta_theta(u_sq, p);

  b = b + (p.mu + p.lambda) *
              spectral::divergence(componentwise(u, [&div](const ScalarField& c) {
                return spectral::product(c, div);
              }));

  if (!ker.eta.is_zero()) {
    const auto eta = ker.eta.table(g);
    // flux_j = sum_i (eta * d_j u^i) u^i ; dissipated part (eta * grad u) : grad u
    std::array<ScalarField, 3> flux{ScalarField(g), ScalarField(g), ScalarField(g)};
    ScalarField contraction(g);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const auto dji = spectral::derivative(u[i], j);
        const auto eta_dji = convolve(eta, dji);
        flux[j] = flux[j] + spectral::product(eta_dji, u[i]);
        contraction = contraction + spectral::product(eta_dji, dji);
      }
    }
    b = b + spectral::divergence(VectorField(flux[0], flux[1], flux[2])) - contraction;
  }

  if (!ker.xi.is_zero()) {
    const auto xi_div = convolve(ker.xi, div);
    b = b + spectral::divergence(componentwise(u, [&xi_div](const ScalarField& c) {
          return spectral::product(xi_div, c);
        })) -
        spectral::product(xi_div, div);
  }
  return b;
}

/// Pointwise <A u, u>, dealiased.
inline ScalarField pointwise_Au_dot_u(const VectorField& u, const PhysParams& p,
                                      const KernelSpec& ker) {
  const auto au = apply_A(u, p, ker);
  return spectral::product(au[0], u[0]) + spectral::product(au[1], u[1]) +
         spectral::product(au[2], u[2]);
}

// ---------------------------------------------------------------------------
// Coercivity.

struct CoercivityBounds {
  double lhs = 0.0;   // -int <A u, u>
  double rhs1 = 0.0;  // bound under the L^1 kernel-size alternative
  double rhs2 = 0.0;  // bound under the nonnegative-coefficient alternative
};

/// Sum_k 4 pi^2 |k|^2 |u_hat|^2, i.e. int grad u : grad u.
inline double grad_norm_sq(const VectorField& u) {
  const Grid& g = u.grid();
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    auto sp = u[c].spectral();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const auto k = g.wavevector(idx);
      s += two_pi * two_pi * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * std::norm(sp[idx]);
    }
  }
  return s;
}

inline CoercivityBounds coercivity_bounds(const VectorField& u, const PhysParams& p,
                                          const KernelSpec& ker) {
  const Grid& g = u.grid();
  CoercivityBounds out;
  out.lhs = dissipation(u, p, ker);

  const double grad_sq = grad_norm_sq(u);
  const auto div = spectral::divergence(u);
  const double div_sq = spectral::spectral_inner(div, div);
  const double l1_eta = ker.eta.l1_norm(g);
  const double l1_xi = ker.xi.l1_norm(g);
  out.rhs1 = (p.min_shear() - l1_eta - l1_xi / 3.0) * grad_sq + (p.mu + p.lambda) * div_sq;

  const auto eta = ker.eta.table(g);
  const auto xi = ker.xi.table(g);
  double eta_part = 0.0;
  double xi_part = 0.0;
  auto ds = div.spectral();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto k = g.wavevector(idx);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    double grad_mode = 0.0;
    for (int c = 0; c < 3; ++c) grad_mode += std::norm(u[c].spectral()[idx]);
    eta_part += eta[idx] * two_pi * two_pi * k2 * grad_mode;
    xi_part += xi[idx] * std::norm(ds[idx]);
  }
  out.rhs2 = p.min_shear() * grad_sq + eta_part + xi_part;
  return out;
}

// ---------------------------------------------------------------------------
// Divergence identities of A.

struct FluxIdentityResiduals {
  double residual_div = 0.0;
  double residual_divtheta = 0.0;
  double scale_div = 0.0;       // ||div A u||, for relative comparisons
  double scale_divtheta = 0.0;  // ||div_theta A u||
};

inline FluxIdentityResiduals flux_operator_identities(const VectorField& u, const PhysParams& p,
                                                      const KernelSpec& ker) {
  const auto au = apply_A(u, p, ker);
  const auto div = spectral::divergence(u);
  const auto eta_xi_div = convolve(ker.eta, div) + convolve(ker.xi, div);

  const auto div_au = spectral::divergence(au);
  const auto rhs_div = p.mu * apply_delta_theta(div, p) +
                       (p.mu + p.lambda) * spectral::laplacian(div) +
                       spectral::laplacian(eta_xi_div);

  const auto divth = div_theta(u, p);
  const auto divth_au = div_theta(au, p);
  const auto rhs_divth =
      apply_delta_theta(p.mu * divth + (p.mu + p.lambda) * div + convolve(ker.xi, div), p) +
      spectral::laplacian(convolve(ker.eta, divth));

  FluxIdentityResiduals r;
  r.residual_div = spectral::l2_norm(div_au - rhs_div);
  r.residual_divtheta = spectral::l2_norm(divth_au - rhs_divth);
  r.scale_div = spectral::l2_norm(div_au);
  r.scale_divtheta = spectral::l2_norm(divth_au);
  return r;
}

}  // namespace anisoflow::ops
