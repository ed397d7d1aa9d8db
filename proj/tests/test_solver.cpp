#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anisoflow/solver.hpp"

using namespace anisoflow;
namespace sp = anisoflow::spectral;
namespace so = anisoflow::solver;

namespace {

constexpr double pi = std::numbers::pi;

VectorField forcing(Grid g, double amp) {
  return {ScalarField::sample(g, [amp](double x, double, double) { return amp * std::sin(2 * pi * x); }),
          ScalarField(g),
          ScalarField::sample(g, [amp](double, double y, double) { return 0.5 * amp * std::cos(2 * pi * y); })};
}

PhysParams reference() {
  PhysParams p;
  p.theta = 0.2;
  return p;
}

}  // namespace

TEST(Schedule, DeltaFirstThenEps) {
  const auto s = so::build_schedule({0.1, 0.01}, {0.1, 0.01, 0.001});
  const std::vector<so::RegPoint> expect{{0.1, 0.1}, {0.1, 0.01}, {0.1, 0.001}, {0.01, 0.001}};
  EXPECT_EQ(s, expect);
  EXPECT_EQ(so::build_schedule({0.1, 0.1}, {0.5, 0.5}).size(), 1u);
  EXPECT_THROW(so::build_schedule({0.1, 0.2}, {0.1}), std::invalid_argument);
  EXPECT_THROW(so::build_schedule({}, {0.1}), std::invalid_argument);
  EXPECT_THROW(so::build_schedule({1.5}, {0.1}), std::invalid_argument);
}

TEST(SolverConfig, Validation) {
  so::SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.relax = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.homotopy_schedule = {0.5};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.tol = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(EnergyTerms, TrivialStateBalances) {
  const Grid g(8);
  PhysParams p;
  p.M = 1.7;
  const auto e = so::energy_terms(ScalarField::constant(g, p.M), VectorField(g), p, {}, 0.1, 0.3,
                                  VectorField(g));
  EXPECT_EQ(e.dissipation, 0.0);
  EXPECT_NEAR(e.pressure, p.a * p.gamma * 0.3 / (p.gamma - 1) * std::pow(p.M, p.gamma), 1e-12);
  EXPECT_NEAR(e.defect(), 0.0, 1e-12);
}

TEST(FixedPoint, ZeroForcingIsImmediatelyTrivial) {
  const Grid g(16);
  const auto p = reference();
  const auto s = so::fixed_point_solve(p, {}, VectorField(g), 0.1, 0.1, {});
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.iteration, 0);
  EXPECT_EQ(s.r_mass, 0.0);
  EXPECT_EQ(s.r_mom, 0.0);
  EXPECT_EQ(sp::max_abs(s.rho - ScalarField::constant(g, p.M)), 0.0);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(sp::max_abs(s.u[c]), 0.0);
}

class ConvergedSolve : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = new Grid(8);
    g_ = new VectorField(forcing(*grid_, 0.5));
    state_ = new so::SolverState(so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.1, {}));
  }
  static void TearDownTestSuite() {
    delete state_;
    delete g_;
    delete grid_;
  }
  static Grid* grid_;
  static VectorField* g_;
  static so::SolverState* state_;
};

Grid* ConvergedSolve::grid_ = nullptr;
VectorField* ConvergedSolve::g_ = nullptr;
so::SolverState* ConvergedSolve::state_ = nullptr;

TEST_F(ConvergedSolve, ResidualsMassAndMean) {
  const auto& s = *state_;
  ASSERT_TRUE(s.converged) << s.status;
  EXPECT_EQ(s.status, "converged");
  EXPECT_LE(s.r_mass, 1e-10);
  EXPECT_LE(s.r_mom, 1e-10);
  EXPECT_NEAR(s.rho.mean(), 1.0, 1e-12);
  EXPECT_TRUE(s.u.is_mean_zero());
  const auto r = so::system_residual(s, reference(), {}, *g_);
  EXPECT_NEAR(r.r_mom, s.r_mom, 1e-15);
  EXPECT_EQ(s.log.size(), static_cast<std::size_t>(s.iteration + 1));
  EXPECT_EQ(s.residual_history.size(), s.log.size());
}

TEST_F(ConvergedSolve, EnergyIdentityHolds) {
  const auto e = so::energy_terms(state_->rho, state_->u, reference(), {}, 0.1, 0.1, *g_);
  EXPECT_GT(e.dissipation, 0.0);
  EXPECT_GT(e.forcing, 0.0);
  EXPECT_LT(e.relative_defect(), 1e-6);
}

TEST_F(ConvergedSolve, WarmStartNeverStartsWorse) {
  std::vector<double> cold_first, warm_first;
  so::SolverConfig cfg;
  cfg.max_iter = 1;
  so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.05, cfg, std::nullopt,
                        [&](const so::IterationRecord& r) { cold_first.push_back(std::max(r.r_mass, r.r_mom)); });
  so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.05, cfg, state_->u,
                        [&](const so::IterationRecord& r) { warm_first.push_back(std::max(r.r_mass, r.r_mom)); });
  ASSERT_FALSE(cold_first.empty());
  ASSERT_FALSE(warm_first.empty());
  EXPECT_LE(warm_first.front(), cold_first.front());
  // Restarting at the same point from the solution is already converged.
  const auto again = so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.1, {}, state_->u);
  EXPECT_TRUE(again.converged);
  EXPECT_LE(again.iteration, 1);
}

TEST_F(ConvergedSolve, HomotopyWalkReachesTheSameState) {
  so::SolverConfig cfg;
  cfg.homotopy_schedule = {0.25, 0.5, 1.0};
  std::vector<double> seen;
  const auto s = so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.1, cfg, std::nullopt,
                                       [&](const so::IterationRecord& r) { seen.push_back(r.homotopy); });
  ASSERT_TRUE(s.converged);
  EXPECT_EQ(seen.front(), 0.25);
  EXPECT_EQ(seen.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  for (int c = 0; c < 3; ++c) EXPECT_LT(sp::max_abs(s.u[c] - state_->u[c]), 1e-9);
}

TEST_F(ConvergedSolve, DissipationIsNonnegativeAlongTheIteration) {
  so::SolverConfig cfg;
  cfg.max_iter = 6;
  const auto s = so::fixed_point_solve(reference(), {}, *g_, 0.1, 0.1, cfg);
  EXPECT_GE(ops::dissipation(s.u, reference(), {}), 0.0);
}

TEST(FixedPoint, IterationCapReturnsFlaggedBestState) {
  const Grid g(8);
  so::SolverConfig cfg;
  cfg.max_iter = 3;
  const auto s = so::fixed_point_solve(reference(), {}, forcing(g, 0.5), 0.1, 0.1, cfg);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.status, "iteration limit reached");
  EXPECT_EQ(s.log.size(), 3u);
  const double best = *std::min_element(s.residual_history.begin(), s.residual_history.end());
  EXPECT_NEAR(std::max(s.r_mass, s.r_mom), best, 1e-14);
}

TEST(Continuation, TrivialSchedule) {
  const Grid g(8);
  so::SolverConfig cfg;
  cfg.continuation_schedule = {{1.0, 1.0}};
  const auto r = so::continuation_run(reference(), {}, VectorField(g), cfg);
  ASSERT_TRUE(r.completed);
  ASSERT_EQ(r.states.size(), 1u);
  EXPECT_EQ(r.states[0].iteration, 0);
  EXPECT_NEAR(r.calibration, 1.1 * r.monitors[0].energy_lhs, 1e-15);
}

TEST(Continuation, WarmStartedSweepStaysCalibrated) {
  const Grid g(8);
  so::SolverConfig cfg;
  cfg.continuation_schedule = so::build_schedule({0.1}, {0.1, 0.01});
  std::vector<std::size_t> seen;
  const auto r = so::continuation_run(reference(), {}, forcing(g, 0.5), cfg, std::nullopt,
                                      [&](std::size_t i, const so::IterationRecord&) { seen.push_back(i); });
  ASSERT_TRUE(r.completed);
  ASSERT_EQ(r.states.size(), 2u);
  EXPECT_EQ(seen.front(), 0u);
  EXPECT_EQ(seen.back(), 1u);
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    EXPECT_TRUE(so::within_calibration(r.monitors[i], r.calibration)) << i;
    EXPECT_EQ(r.states[i].delta, cfg.continuation_schedule[i].delta);
  }
  EXPECT_LT(r.monitors[1].delta_rho_gamma, r.monitors[0].delta_rho_gamma);
}

TEST(Continuation, AbortsOnNonConvergence) {
  const Grid g(8);
  so::SolverConfig cfg;
  cfg.max_iter = 2;
  cfg.continuation_schedule = so::build_schedule({0.1}, {0.1, 0.01});
  const auto r = so::continuation_run(reference(), {}, forcing(g, 0.5), cfg);
  EXPECT_FALSE(r.completed);
  EXPECT_EQ(r.states.size(), 1u);
}

TEST(Calibration, Comparison) {
  so::Monitors m;
  m.delta_rho_gamma = 0.5;
  m.eps_grad_rho_half = 0.1;
  m.energy_lhs = 0.9;
  EXPECT_TRUE(so::within_calibration(m, 1.0));
  m.energy_lhs = 1.01;
  EXPECT_FALSE(so::within_calibration(m, 1.0));
}
