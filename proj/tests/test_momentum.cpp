#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anisoflow/momentum.hpp"
#include "anisoflow/random.hpp"

using namespace anisoflow;
namespace sp = anisoflow::spectral;
namespace mo = anisoflow::momentum;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField wave(Grid g, double amp, int k, bool cosine = false) {
  return ScalarField::sample(g, [=](double x, double, double) {
    return amp * (cosine ? std::cos(2 * pi * k * x) : std::sin(2 * pi * k * x));
  });
}

double moll(int k2, double delta) { return std::exp(-delta * delta * 4 * pi * pi * k2); }

}  // namespace

TEST(DensityPower, IntegerAndFractionalExponents) {
  const Grid g(8);
  auto c = ScalarField::constant(g, 1.7);
  EXPECT_NEAR(mo::density_power(c, 4.0).nodal()[3], std::pow(1.7, 4.0), 1e-13);
  EXPECT_NEAR(mo::density_power(c, 2.5).nodal()[3], std::pow(1.7, 2.5), 1e-13);
  // Integer powers accept negative values.
  auto neg = ScalarField::constant(g, -0.5);
  EXPECT_NEAR(mo::density_power(neg, 3.0).mean(), -0.125, 1e-15);
  EXPECT_THROW(mo::density_power(neg, 2.5), mo::NegativeDensity);
  // Undershoot inside the tolerance is clamped at the floor.
  auto tiny = ScalarField::constant(g, -1e-10);
  EXPECT_NEAR(mo::density_power(tiny, 1.5).mean(), std::pow(1e-14, 1.5), 1e-25);
}

TEST(DensityPower, ResultIsDealiased) {
  const Grid g(16);
  auto rho = ScalarField::constant(g, 1.0) + wave(g, 0.3, 3, true);
  // rho^2 contains cos(2 pi 6 x), above the cutoff n/3.
  auto r2 = mo::density_power(rho, 2.0);
  EXPECT_EQ(std::abs(r2.coefficient({6, 0, 0})), 0.0);
  EXPECT_NEAR(r2.mean(), 1.0 + 0.045, 1e-14);
}

TEST(MomentumRhs, TrivialStateIsZero) {
  const Grid g(8);
  PhysParams p;
  const auto rhs = mo::momentum_rhs(ScalarField::constant(g, p.M), VectorField(g), p, {}, 0.1,
                                    0.1, VectorField(g));
  for (int c = 0; c < 3; ++c) EXPECT_EQ(sp::max_abs(rhs[c]), 0.0);
}

TEST(MomentumRhs, DampingAndForcing) {
  const Grid g(16);
  PhysParams p;
  p.M = 1.5;
  const double delta = 0.2;
  // Shear flow along x varying in z: convection vanishes identically.
  VectorField v(ScalarField::sample(g, [](double, double, double z) { return std::sin(2 * pi * z); }),
                ScalarField(g), ScalarField(g));
  VectorField f(ScalarField(g), wave(g, 0.8, 2), ScalarField(g));
  const auto rhs = mo::momentum_rhs(ScalarField::constant(g, p.M), v, p, {}, 0.1, delta, f);
  EXPECT_LT(sp::max_abs(rhs[0] + 0.5 * delta * p.M * v[0]), 1e-13);
  EXPECT_LT(sp::max_abs(rhs[1] - moll(4, delta) * f[1]), 1e-13);
  EXPECT_LT(sp::max_abs(rhs[2]), 1e-13);
}

TEST(MomentumRhs, MollifiedPressureGradient) {
  const Grid g(16);
  PhysParams p;
  p.gamma = 2.0;
  p.a = 1.3;
  const double M = 1.0, e0 = 0.2, delta = 0.1;
  auto rho = ScalarField::constant(g, M) + wave(g, e0, 1, true);
  const auto rhs = mo::momentum_rhs(rho, VectorField(g), p, {}, 0.1, delta, VectorField(g));
  // a rho^2 = a(M^2 + e0^2/2 + 2 M e0 cos 2pi x + (e0^2/2) cos 4pi x)
  auto expect = ScalarField::sample(g, [&](double x, double, double) {
    return p.a * (2 * pi * 2 * M * e0 * moll(1, delta) * std::sin(2 * pi * x) +
                  4 * pi * 0.5 * e0 * e0 * moll(4, delta) * std::sin(4 * pi * x));
  });
  EXPECT_LT(sp::max_abs(rhs[0] - expect), 1e-12);
  EXPECT_LT(sp::max_abs(rhs[1]) + sp::max_abs(rhs[2]), 1e-13);
}

TEST(MomentumRhs, DensityGradientCrossTerm) {
  const Grid g(16);
  PhysParams p;
  p.gamma = 2.0;
  const double M = 1.0, e0 = 0.1, delta = 0.3, eps = 0.05;
  auto rho = ScalarField::constant(g, M) + wave(g, e0, 1, true);
  VectorField v(ScalarField(g), wave(g, 1.0, 1), ScalarField(g));
  const auto rhs = mo::momentum_rhs(rho, v, p, {}, eps, delta, VectorField(g));
  // y-component: -(delta/2) rho v2 - eps d1 v2 d1 rho ; convection depends on y only through w2 d2 = 0.
  auto expect = ScalarField::sample(g, [&](double x, double, double) {
    return -0.5 * delta * (M * std::sin(2 * pi * x) + 0.5 * e0 * std::sin(4 * pi * x)) +
           eps * 2 * pi * pi * e0 * std::sin(4 * pi * x);
  });
  EXPECT_LT(sp::max_abs(rhs[1] - expect), 1e-13);
}

TEST(MomentumRhs, ConvectionOfAShearPair) {
  const Grid g(16);
  PhysParams p;
  const double delta = 0.1;
  // v = (sin 2pi y, sin 2pi x, 0); rho = 1. div(w (x) v)_1 = w2 d2 v1 = m sin(2pi x) 2pi cos(2pi y).
  VectorField v(ScalarField::sample(g, [](double, double y, double) { return std::sin(2 * pi * y); }),
                wave(g, 1.0, 1), ScalarField(g));
  const auto rhs = mo::momentum_rhs(ScalarField::constant(g, 1.0), v, p, {}, 0.1, delta, VectorField(g));
  auto expect = ScalarField::sample(g, [&](double x, double y, double) {
    return -0.5 * delta * std::sin(2 * pi * y) -
           moll(1, delta) * 2 * pi * std::sin(2 * pi * x) * std::cos(2 * pi * y);
  });
  EXPECT_LT(sp::max_abs(rhs[0] - expect), 1e-12);
}

TEST(ApplyS, SolvesTheLinearizedMomentumEquation) {
  const Grid g(16);
  PhysParams p;
  p.theta = 0.2;
  const KernelSpec ker{Kernel::gaussian(0.1, 0.1), {}};
  auto v = random_trig_vector(g, 2, 3, 0.2, true);
  VectorField f(wave(g, 1.0, 1), ScalarField(g), ScalarField(g));
  const auto S = mo::apply_S(v, p, ker, 0.1, 0.1, f);
  EXPECT_TRUE(S.transport.converged);
  EXPECT_TRUE(S.u.is_mean_zero());
  const auto rhs = mo::momentum_rhs(S.rho, v, p, ker, 0.1, 0.1, f);
  const auto back = -1.0 * ops::apply_A(S.u, p, ker);
  for (int c = 0; c < 3; ++c) EXPECT_LT(sp::max_abs(back[c] - rhs[c]), 1e-11);
}
