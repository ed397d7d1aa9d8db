#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anisoflow/operators.hpp"
#include "anisoflow/random.hpp"
#include "oracles/dense.hpp"

using namespace anisoflow;
namespace sp = anisoflow::spectral;

namespace {

constexpr double pi = std::numbers::pi;

PhysParams params(double mu, double lambda, double theta) {
  PhysParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.theta = theta;
  return p;
}

double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, sp::max_abs(a[c] - b[c]));
  return m;
}

oracle::Vec stack(const VectorField& u) {
  const auto N = static_cast<Eigen::Index>(u.grid().size());
  oracle::Vec v(3 * N);
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index i = 0; i < N; ++i) v[c * N + i] = u[c].nodal()[i];
  return v;
}

KernelSpec small_kernels() {
  return {Kernel::gaussian(0.1, 0.15), Kernel::gaussian(0.15, -0.2)};
}

}  // namespace

TEST(DeltaTheta, SingleModes) {
  const Grid g(8);
  const auto p = params(1.0, 1.0, 0.5);
  auto f = ScalarField::sample(g, [](double x, double, double z) {
    return std::sin(2 * pi * x) + std::cos(2 * pi * z);
  });
  auto expect = ScalarField::sample(g, [](double x, double, double z) {
    return -4 * pi * pi * (std::sin(2 * pi * x) + 1.5 * std::cos(2 * pi * z));
  });
  EXPECT_LT(sp::max_abs(ops::apply_delta_theta(f, p) - expect), 1e-11);
  // div_theta grad = Delta_theta when theta > -1.
  auto r = random_trig_field(g, 2, 4);
  EXPECT_LT(sp::max_abs(ops::div_theta(VectorField(sp::derivative(r, 0), sp::derivative(r, 1),
                                                   sp::derivative(r, 2)),
                                       p) -
                        ops::apply_delta_theta(r, p)),
            1e-10);
  EXPECT_THROW(ops::grad_theta(r, params(1.0, 1.0, -1.0)), std::invalid_argument);
}

TEST(OperatorA, ShearAndLongitudinalModes) {
  const Grid g(8);
  const auto p = params(1.3, 0.4, 0.2);
  // Transverse: u = (sin 2 pi z, 0, 0), div u = 0.
  VectorField shear(ScalarField::sample(g, [](double, double, double z) { return std::sin(2 * pi * z); }),
                    ScalarField(g), ScalarField(g));
  auto a1 = ops::apply_A(shear, p, {});
  EXPECT_LT(sp::max_abs(a1[0] + 4 * pi * pi * p.mu * (1 + p.theta) * shear[0]), 1e-11);
  EXPECT_LT(sp::max_abs(a1[1]) + sp::max_abs(a1[2]), 1e-12);
  // Longitudinal: u = (sin 2 pi x, 0, 0), grad div u = -4 pi^2 u.
  VectorField lon(ScalarField::sample(g, [](double x, double, double) { return std::sin(2 * pi * x); }),
                  ScalarField(g), ScalarField(g));
  auto a2 = ops::apply_A(lon, p, {});
  EXPECT_LT(sp::max_abs(a2[0] + 4 * pi * pi * (2 * p.mu + p.lambda) * lon[0]), 1e-11);
}

TEST(OperatorA, KernelsActAsFourierWeights) {
  const Grid g(8);
  const auto p = params(1.0, 1.0, 0.0);
  KernelSpec ker{Kernel::from_modes({{{1, 0, 0}, 0.3}}), Kernel::from_modes({{{1, 0, 0}, 0.2}})};
  VectorField lon(ScalarField::sample(g, [](double x, double, double) { return std::sin(2 * pi * x); }),
                  ScalarField(g), ScalarField(g));
  auto a = ops::apply_A(lon, p, ker);
  // mu + (mu + lambda) + eta_hat + xi_hat at k = (1,0,0)
  EXPECT_LT(sp::max_abs(a[0] + 4 * pi * pi * (1.0 + 2.0 + 0.3 + 0.2) * lon[0]), 1e-11);
}

TEST(OperatorA, InverseRoundTrip) {
  const Grid g(16);
  const auto p = params(1.0, 0.5, -0.3);
  const auto ker = small_kernels();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto u = random_trig_vector(g, 5, seed, 1.0, true);
    auto w = ops::invert_A(-1.0 * ops::apply_A(u, p, ker), p, ker);
    EXPECT_LT(max_diff(w, u), 1e-12);
    auto f = random_trig_vector(g, 7, 100 + seed, 1.0, true);
    EXPECT_LT(max_diff(-1.0 * ops::apply_A(ops::invert_A(f, p, ker), p, ker), f), 1e-11);
  }
}

TEST(OperatorA, InverseRejectsMeanAndSingularSymbols) {
  const Grid g(8);
  auto f = random_trig_vector(g, 2, 1, 1.0, false);
  EXPECT_THROW(ops::invert_A(f, params(1, 1, 0), {}), std::invalid_argument);
  auto f0 = sp::project_mean_zero(f);
  // mu + lambda + xi_hat = 0 along one mode: longitudinal part degenerates.
  try {
    ops::invert_A(f0, params(1.0, -2.0, 0.0), {});
    FAIL() << "expected SingularSymbol";
  } catch (const ops::SingularSymbol& e) {
    const auto k = e.mode();
    EXPECT_FALSE(k[0] == 0 && k[1] == 0 && k[2] == 0);
    EXPECT_NE(std::string(e.what()).find("k=("), std::string::npos);
  }
  EXPECT_THROW(ops::invert_A(f0, params(0.0, 1.0, 0.0), {}), ops::SingularSymbol);
}

TEST(OperatorA, DenseOracleOnSmallGrid) {
  const Grid g(4);
  const oracle::Lattice L(4);
  const auto p = params(0.8, 0.7, 0.35);
  const auto ker = small_kernels();
  const auto A = oracle::assemble_A(L, p.mu, p.lambda, p.theta, ker.eta.table(g), ker.xi.table(g));
  auto u = random_trig_vector(g, 1, 8, 1.0, true);
  const oracle::Vec Au = A * stack(u);
  const oracle::Vec mine = stack(ops::apply_A(u, p, ker));
  EXPECT_LT((Au - mine).norm() / Au.norm(), 1e-12);

  // Full-band right-hand side, Nyquist modes included.
  VectorField f(sp::project_mean_zero(random_nodal_field(g, 3, 1)),
                sp::project_mean_zero(random_nodal_field(g, 3, 2)),
                sp::project_mean_zero(random_nodal_field(g, 3, 3)));
  const oracle::Vec dense = oracle::solve_minus_A(L, A, stack(f));
  const oracle::Vec spec = stack(ops::invert_A(f, p, ker));
  EXPECT_LT((dense - spec).norm() / dense.norm(), 1e-10);
}

TEST(QuadraticForms, PointwiseSplitIsExactForBandLimitedFields) {
  const Grid g(16);  // dealias cutoff 5; products of cutoff-2 fields are exact
  const auto p = params(1.1, 0.6, 0.4);
  const auto ker = small_kernels();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto u = random_trig_vector(g, 2, seed, 1.0, true);
    auto lhs = ops::pointwise_Au_dot_u(u, p, ker);
    auto rhs = ops::quadratic_form_B(u, p, ker) - ops::quadratic_form_C(u, p);
    EXPECT_LT(sp::max_abs(lhs - rhs) / (1.0 + sp::max_abs(lhs)), 1e-11) << "seed " << seed;
    // B is a divergence up to kernel contractions that the C side compensates; the
    // integrated identity is the dissipation.
    EXPECT_NEAR(-lhs.mean(), ops::dissipation(u, p, ker), 1e-9 * (1.0 + std::abs(lhs.mean())));
  }
}

TEST(QuadraticForms, CEqualsGradientEnergyWithoutAnisotropy) {
  const Grid g(16);
  const auto p = params(1.0, 0.0, 0.0);
  auto u = random_trig_vector(g, 2, 5, 1.0, true);
  auto c = ops::quadratic_form_C(u, p);
  const auto div = sp::divergence(u);
  EXPECT_NEAR(c.mean(), ops::grad_norm_sq(u) + sp::integral_product(div, div), 1e-9);
}

TEST(Coercivity, BothAlternativesOnRandomFields) {
  const Grid g(16);
  const auto p = params(1.0, 0.5, 0.3);
  KernelSpec small{Kernel::gaussian(0.1, -0.1), Kernel::gaussian(0.1, 0.1)};
  KernelSpec nonneg{Kernel::gaussian(0.1, 2.0), Kernel::gaussian(0.2, 1.5)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto u = random_trig_vector(g, 4, seed, 1.0, true);
    const auto a = ops::coercivity_bounds(u, p, small);
    EXPECT_GE(a.lhs, a.rhs1 - 1e-10);
    const auto b = ops::coercivity_bounds(u, p, nonneg);
    EXPECT_GE(b.lhs, b.rhs2 - 1e-10);
    EXPECT_GT(b.lhs, 0.0);
  }
}

TEST(Coercivity, NonnegativeBoundIsSharpForTransverseModes) {
  const Grid g(8);
  const auto p = params(1.0, 1.0, 0.0);
  KernelSpec ker{Kernel::gaussian(0.1, 1.0), {}};
  // Divergence-free shear: -<Au,u> = (mu + eta_hat)|grad u|^2 exactly.
  VectorField u(ScalarField::sample(g, [](double, double, double z) { return std::sin(2 * pi * z); }),
                ScalarField(g), ScalarField(g));
  const auto b = ops::coercivity_bounds(u, p, ker);
  EXPECT_NEAR(b.lhs, b.rhs2, 1e-12);
}

TEST(Coercivity, SmallL1BoundCanFailForAdversarialLongitudinalMode) {
  // With xi_hat(k) close to -||xi||_1 on a longitudinal mode, the factor 1/3
  // in front of ||xi||_1 is too optimistic.
  const Grid g(8);
  const auto p = params(1.0, 0.0, 0.0);
  KernelSpec ker{{}, Kernel::from_modes({{{1, 0, 0}, -0.3}})};
  VectorField u(ScalarField::sample(g, [](double x, double, double) { return std::sin(2 * pi * x); }),
                ScalarField(g), ScalarField(g));
  const auto b = ops::coercivity_bounds(u, p, ker);
  EXPECT_LT(b.lhs, b.rhs1);
}

TEST(FluxIdentities, DivergenceOfAu) {
  const Grid g(16);
  const auto p = params(1.0, 0.7, 0.25);
  const auto ker = small_kernels();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto u = random_trig_vector(g, 4, seed, 1.0, true);
    const auto r = ops::flux_operator_identities(u, p, ker);
    EXPECT_LT(r.residual_div, 1e-10 * r.scale_div);
    EXPECT_LT(r.residual_divtheta, 1e-10 * r.scale_divtheta);
  }
}

TEST(Convolution, GaussianL1AndMollifierMean) {
  const Grid g(16);
  const auto k = Kernel::gaussian(0.1, 0.5);
  // Positive kernel: ||k||_1 = int k = hat(0).
  EXPECT_NEAR(k.l1_norm(g), 0.5, 1e-12);
  auto f = random_trig_field(g, 3, 2, 0, 1.0, false);
  EXPECT_NEAR(ops::mollify(f, 0.3).mean(), f.mean(), 1e-15);
  auto m = ops::mollify(ScalarField::sample(g, [](double x, double, double) { return std::cos(2 * pi * x); }),
                        0.2);
  EXPECT_NEAR(m.nodal()[0], std::exp(-0.04 * 4 * pi * pi), 1e-14);
}
