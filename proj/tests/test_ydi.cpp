#include <gtest/gtest.h>

#include <cmath>

#include "roughinc/drivers.hpp"
#include "roughinc/map_expr.hpp"
#include "roughinc/young.hpp"
#include "roughinc/ydi.hpp"

using namespace roughinc;

namespace {

Path fbm(double H, std::uint64_t seed, int level) {
  DriverSpec s;
  s.hurst = H;
  s.seed = seed;
  s.level = level;
  return sample_fbm(s);
}

}  // namespace

TEST(HorizonT0, DegenerateNormsGiveOne) { EXPECT_EQ(horizon_T0(0.75, 0.625, 1.0, 0, 0, 0), 1.0); }

TEST(HorizonT0, ScaledFixtureGivesOne) {
  EXPECT_LE(2 * 0.1 * 1.0, 1.0);
  EXPECT_LE(0.2, 1 - std::pow(2.0, -0.375));
  EXPECT_LE(0.1, 1 - std::pow(2.0, -0.625));
  EXPECT_EQ(horizon_T0(0.75, 0.625, 1.0, 0.1, 0.1, 1.0), 1.0);
}

TEST(HorizonT0, UnitNormsPickSmallestTerm) {
  double terms[] = {1.0, std::pow(2.0, -16), std::pow(2 / (1 - std::pow(2.0, -0.375)), -16), std::pow(1 / (1 - std::pow(2.0, -0.625)), -32)};
  double want = *std::min_element(std::begin(terms), std::end(terms));
  EXPECT_DOUBLE_EQ(horizon_T0(0.75, 0.625, 1.0, 1, 1, 1), want);
}

TEST(YdiConfig, ExponentChainIsValidated) {
  YdiConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta = 0.45;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = YdiConfig{};
  c.q = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = YdiConfig{};
  c.alpha = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(YdiApproximate, ConstantSingletonIsExact) {
  Path x = fbm(0.7, 2, 8);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0,b=0.4)"));
  for (int m : {0, 3, 8}) {
    YdiSolution sol = ydi_approximate(F, x, scalar(1.0), m);
    EXPECT_TRUE((sol.v.values.array() == 0.4).all());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(sol.z.values(0, static_cast<Eigen::Index>(i)), 1.0 + 0.4 * x.values(0, static_cast<Eigen::Index>(i)), 1e-14);
    EXPECT_LT(representation_check(sol, x, 0), 1e-14);
  }
}

TEST(YdiApproximate, ZeroDriver) {
  DyadicGrid g(1.0, 6);
  Path x = Path::zeros(g, 1);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0.3,lo=0.1,hi=0.5)"));
  YdiSolution sol = ydi_approximate(F, x, scalar(0.2), 6, scalar(0.3 * std::sin(0.2) + 0.5));
  EXPECT_TRUE((sol.z.values.array() == 0.2).all());
  EXPECT_TRUE((sol.v.values.array() == 0.3 * std::sin(0.2) + 0.5).all());
  YdiConfig cfg;
  cfg.xi = scalar(0.2);
  YdiRun run = ydi_solve(F, x, cfg, 0.0);
  EXPECT_EQ(run.solution.level, 0);
  EXPECT_TRUE(run.solution.diagnostics.certified);
}

TEST(YdiApproximate, TwoPointStaysOnStartingValue) {
  Path x = fbm(0.8, 4, 9);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0,lo=-0.3,hi=0.3)"));
  YdiSolution sol = ydi_approximate(F, x, scalar(1.0), 9, scalar(-0.3));
  EXPECT_TRUE((sol.v.values.array() == -0.3).all());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(sol.z.values(0, static_cast<Eigen::Index>(i)), 1.0 - 0.3 * x.values(0, static_cast<Eigen::Index>(i)), 1e-14);
}

TEST(YdiApproximate, RejectsVelocityOutsideTheSet) {
  Path x = fbm(0.8, 4, 4);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0,lo=-0.3,hi=0.3)"));
  EXPECT_THROW(ydi_approximate(F, x, scalar(0), 4, scalar(0.1)), std::invalid_argument);
  EXPECT_THROW(ydi_approximate(F, x, scalar(0), 5), std::invalid_argument);
}

TEST(Representation, IdentityHoldsAtEveryLevel) {
  Path x = fbm(0.75, 13, 10);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0.2,lo=-0.1,hi=0.3)"));
  for (int m : {4, 7, 10}) {
    YdiSolution sol = ydi_approximate(F, x, scalar(0.5), m);
    for (int n = 0; n <= m; ++n) EXPECT_LT(representation_check(sol, x, n), 1e-12);
    EXPECT_LT(representation_check(sol, x, m), 1e-14);
  }
}

TEST(InclusionResidual, ZeroByConstructionAndMeasuresPerturbation) {
  Path x = fbm(0.75, 13, 8);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0.2,lo=-0.1,hi=0.3)"));
  YdiSolution sol = ydi_approximate(F, x, scalar(0.5), 6);
  EXPECT_EQ(inclusion_residual(sol, F), 0.0);
  sol.v.values(0, 5) += 0.01;
  EXPECT_NEAR(inclusion_residual(sol, F), 0.01, 1e-15);
}

TEST(InclusionResidual, SingletonMeasuresDistanceToSigma) {
  Path x = fbm(0.75, 13, 8);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0.1)"));
  YdiSolution sol = ydi_approximate(F, x, scalar(0.5), 5);
  sol.v.values(0, 3) = 7.0;
  double want = std::abs(7.0 - 0.1 * std::sin(sol.z.values(0, 3 * 8)));
  EXPECT_NEAR(inclusion_residual(sol, F), want, 1e-15);
}

TEST(YdiApproximate, SingletonConvergesToYoungOde) {
  Path x = fbm(0.8, 42, 11);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0.1)"));
  auto ode = young_ode_solve([](const Vec& z) { return Mat::Constant(1, 1, 0.1 * std::sin(z[0])); }, x, scalar(1.0));
  ASSERT_TRUE(ode.converged);
  double prev = 1e9;
  for (int m = 7; m <= 11; ++m) {
    double e = (ydi_approximate(F, x, scalar(1.0), m).z.values - ode.z.values).cwiseAbs().maxCoeff();
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(BoundReport, ConstantSingletonPasses) {
  Path x = fbm(0.8, 5, 8);
  x.values /= holder_seminorm(x, 0.75);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0,b=0.1)"));
  YdiConfig cfg;
  cfg.xi = scalar(0.0);
  double T0 = horizon_T0(0.75, 0.625, 1, 0.1, 0.1, 1.0);
  for (int m = 0; m <= 8; ++m) EXPECT_TRUE(bound_report(ydi_approximate(F, x, cfg.xi, m), cfg, x, 1.0, T0).pass());
}

TEST(BoundReport, ScaledTwoPointFixturePasses) {
  Path x = fbm(0.8, 42, 11);
  x.values /= holder_seminorm(x, 0.75);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0.05,lo=0,hi=0.05)"));
  YdiConfig cfg;
  cfg.xi = scalar(0.3);
  const double T0 = horizon_T0(cfg.alpha, cfg.beta, cfg.gamma, 0.1, 0.1, holder_seminorm(x, 0.75));
  ASSERT_EQ(T0, 1.0);
  for (int m = 0; m <= 11; ++m) {
    YdiSolution sol = ydi_approximate(F, x, cfg.xi, m);
    BoundReport b = bound_report(sol, cfg, x, 1.0, T0);
    EXPECT_TRUE(b.pass()) << "m=" << m;
    if (m >= 1) {
      EXPECT_TRUE(bound_report(sol, cfg, x, 0.5, T0).pass()) << "m=" << m;
    }
    double rhs = std::pow(1 / (1 - std::pow(2.0, -cfg.gamma * cfg.beta * cfg.p)), 1 / cfg.p);
    EXPECT_DOUBLE_EQ(b.pvar_rhs, rhs);
  }
}

TEST(BoundReport, RejectsHorizonBeyondT0) {
  Path x = fbm(0.8, 42, 6);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0.1)"));
  YdiConfig cfg;
  YdiSolution sol = ydi_approximate(F, x, cfg.xi, 4);
  EXPECT_THROW(bound_report(sol, cfg, x, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(bound_report(sol, cfg, x, 0.3, 0.5), std::invalid_argument);
}

TEST(YdiSolve, CertifiesSingletonFixture) {
  Path x = fbm(0.8, 42, 12);
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0.1)"));
  YdiConfig cfg;
  cfg.xi = scalar(1.0);
  cfg.min_level = 4;
  cfg.residual_tol = 2e-3;
  YdiRun run = ydi_solve(F, x, cfg, holder_seminorm(x, cfg.alpha));
  EXPECT_TRUE(run.solution.diagnostics.certified);
  EXPECT_EQ(run.solution.diagnostics.inclusion_residual, 0.0);
  EXPECT_LT(run.solution.diagnostics.cauchy_certificate.back(), cfg.residual_tol);
}

TEST(YdiSolve, ConcatenationCoversShortHorizons) {
  Path x = fbm(0.8, 42, 10);
  x.values *= 20.0;
  SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=1)"));
  YdiConfig cfg;
  cfg.xi = scalar(1.0);
  cfg.concatenate = true;
  cfg.min_level = 6;
  cfg.max_level = 8;
  YdiRun run = ydi_solve(F, x, cfg, holder_seminorm(x, cfg.alpha));
  EXPECT_GT(run.solution.diagnostics.windows, 1u);
  EXPECT_EQ(run.solution.diagnostics.inclusion_residual, 0.0);
  EXPECT_EQ(run.solution.z.values(0, 0), 1.0);
}
