#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "anisoflow/multiplier.hpp"
#include "anisoflow/random.hpp"

using namespace anisoflow;
namespace mp = anisoflow::multiplier;

namespace {

PhysParams params(double mu, double lambda, double theta) {
  PhysParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.theta = theta;
  return p;
}

}  // namespace

TEST(Multiplier, HandValues) {
  EXPECT_EQ(mp::eval_m({1, 2, 3}, params(1, 1, 0)), 0.0);
  EXPECT_NEAR(mp::eval_m({0, 0, 1}, params(1, 0, 1)), 1.0 / 3.0, 1e-15);
  // Horizontal modes carry no correction.
  EXPECT_EQ(mp::eval_m({2, -1, 0}, params(1, 1, 0.5)), 0.0);
  // theta mu k3^2 / [(2mu+lambda)(k1^2+k2^2) + ((2+theta)mu+lambda) k3^2]
  EXPECT_NEAR(mp::eval_m({1, 1, 1}, params(2, 1, 0.5)), 0.5 * 2 / (5.0 * 2 + 6.0), 1e-15);
  EXPECT_THROW(mp::eval_m({0, 0, 0}, params(1, 1, 1)), std::invalid_argument);
}

TEST(Multiplier, SupIsOnTheVerticalAxis) {
  for (double theta : {-0.5, 0.1, 0.7, 2.0}) {
    const auto p = params(1.2, 0.3, theta);
    EXPECT_NEAR(mp::lattice_sup(Grid(8), p), mp::sup_abs_m(p), 1e-15);
    EXPECT_NEAR(std::abs(mp::eval_m({0, 0, 3}, p)), mp::sup_abs_m(p), 1e-15);
  }
}

TEST(Multiplier, MihlinFormulas) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.1, 5.0);
  for (int t = 0; t < 20; ++t) {
    const double a1 = dist(rng), a2 = dist(rng), a3 = dist(rng);
    const auto c = mp::mihlin_constants(a1, a2, a3);
    const double amin = std::min({a1, a2, a3});
    EXPECT_NEAR(c.A0, 1.0 / a3, 1e-12);
    EXPECT_NEAR(c.A1,
                std::max({std::sqrt(a1) / a3, std::sqrt(a2) / a3, 1.0 / std::sqrt(a3)}) /
                    std::sqrt(amin),
                1e-12);
    EXPECT_NEAR(c.A2, std::max({a1 / a3, a2 / a3, 1.0}) / amin, 1e-12);
  }
  EXPECT_THROW(mp::mihlin_constants(1, 0, 1), std::invalid_argument);
}

TEST(Multiplier, MihlinZeroOrderBoundsTheSymbol) {
  // xi3^2 / (a1 xi1^2 + a2 xi2^2 + a3 xi3^2) <= 1/a3 = A0.
  const double a1 = 1.7, a2 = 0.4, a3 = 2.3;
  const auto c = mp::mihlin_constants(a1, a2, a3);
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k) {
        const double v = double(k * k) / (a1 * i * i + a2 * j * j + a3 * k * k);
        EXPECT_LE(v, c.A0 + 1e-15);
      }
}

TEST(Multiplier, L2NormOfCorrectionEqualsLatticeSup) {
  const Grid g(8);
  const auto p = params(1.0, 0.5, 0.8);
  // The top of the symbol is on the vertical axis: a single (0,0,k) mode attains it.
  auto f = ScalarField::sample(g, [](double, double, double z) {
    return std::cos(2 * std::numbers::pi * 3 * z);
  });
  const double ratio = spectral::l2_norm(mp::apply_pressure_correction(f, p)) / spectral::l2_norm(f);
  EXPECT_NEAR(ratio, mp::lattice_sup(g, p), 1e-12);
  // Any other field is bounded by it.
  auto r = random_trig_field(g, 3, 2, 0, 1.0, true);
  EXPECT_LE(spectral::l2_norm(mp::apply_pressure_correction(r, p)),
            mp::lattice_sup(g, p) * spectral::l2_norm(r) + 1e-14);
  EXPECT_THROW(mp::apply_pressure_correction(ScalarField::constant(g, 1.0), p),
               std::invalid_argument);
}

TEST(Smallness, ValuesAndThreshold) {
  // (1+|theta|)|theta| mu |2 lambda + mu| / (lambda + mu)^2
  EXPECT_NEAR(mp::smallness_value(params(1, 0, 1)), 2.0, 1e-15);
  EXPECT_FALSE(mp::check_smallness(params(1, 0, 1), 0.05));
  EXPECT_EQ(mp::smallness_value(params(1, 1, 0)), 0.0);
  EXPECT_TRUE(mp::check_smallness(params(1, 1, 0), 0.05));
  EXPECT_NEAR(mp::smallness_value(params(1, 1, 0.2)), 1.2 * 0.2 * 3 / 4, 1e-15);
}

TEST(Smallness, PropertyBoundAndMonotonicity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> mu_d(0.2, 3.0), lam_d(0.0, 3.0), th_d(-0.9, 2.0);
  for (int t = 0; t < 200; ++t) {
    const auto p = params(mu_d(rng), lam_d(rng), th_d(rng));
    EXPECT_LE(mp::sup_abs_m(p), mp::norm_bound(p, 1.0) + 1e-15);
    // Larger lambda only shrinks the value for lambda >= 0.
    auto q = p;
    q.lambda += 0.5;
    EXPECT_LE(mp::smallness_value(q), mp::smallness_value(p) + 1e-15);
  }
}

TEST(Smallness, ReportCarriesRawValue) {
  const auto r = mp::analyze(params(1, 1, 0.2), 2.0, 0.5);
  EXPECT_NEAR(r.smallness_value, 0.18, 1e-15);
  EXPECT_NEAR(r.norm_bound_value, 0.36, 1e-15);
  EXPECT_TRUE(r.passes_smallness);
  EXPECT_NEAR(r.mihlin_A0, 1.0 / 3.2, 1e-15);
}
