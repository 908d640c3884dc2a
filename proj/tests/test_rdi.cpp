#include <gtest/gtest.h>

#include <cmath>

#include "roughinc/drivers.hpp"
#include "roughinc/map_expr.hpp"
#include "roughinc/rdi.hpp"

using namespace roughinc;

namespace {

RoughPath lifted(std::uint64_t seed, int level) {
  DriverSpec s;
  s.hurst = 0.45;
  s.seed = seed;
  s.level = level;
  return lift_piecewise_linear(sample_fbm(s), 0.45);
}

RdiConfig config(double xi) {
  RdiConfig c;
  c.xi = scalar(xi);
  c.L = 1.5;
  c.M = 3.0;
  return c;
}

SetValuedMap time_map(std::function<SetValue(double)> f) {
  SetValuedMap m;
  m.eval = [f](double t, const Vec&) { return f(t); };
  return m;
}

}  // namespace

TEST(PhiSelection, Examples) {
  DyadicGrid g(1.0, 5);
  Path y = Path::zeros(g, 1);
  Path w0 = Path::zeros(g, 1, Interpolation::step);
  RdiConfig cfg = config(0);

  PhiSelection a = phi_selection(time_map([](double) -> SetValue { return cloud1({0.7}); }), y, w0, cfg);
  EXPECT_TRUE((a.w.values.array() == 0.7).all());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.x.values(0, static_cast<Eigen::Index>(i)), 0.7 * g.time(static_cast<std::int64_t>(i)), 1e-15);

  PhiSelection b = phi_selection(time_map([](double) -> SetValue { return make_box(scalar(-1), scalar(1)); }), y, w0, cfg);
  EXPECT_EQ(b.w.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.x.values.cwiseAbs().maxCoeff(), 0.0);

  Path ones = Path::on_grid(g, Mat::Ones(1, 33), Interpolation::step);
  PhiSelection c = phi_selection(time_map([](double) -> SetValue { return cloud1({-1, 1}); }), y, ones, cfg);
  EXPECT_TRUE((c.w.values.array() == 1.0).all());
}

TEST(PhiSelection, FlagsSpeedAndCone) {
  DyadicGrid g(1.0, 4);
  RdiConfig cfg = config(0);
  cfg.L = 0.5;
  cfg.M = 1.0;
  Path y = Path::zeros(g, 1);
  PhiSelection s = phi_selection(time_map([](double t) -> SetValue { return cloud1({t < 0.5 ? 0.0 : 0.9}); }), y, Path::zeros(g, 1, Interpolation::step), cfg);
  EXPECT_TRUE(s.bound_violated);
  EXPECT_EQ(s.cone_violations, 1u);
}

TEST(RdiFixedPoint, ZeroDriftConstantForm) {
  RoughPath X = lifted(5, 8);
  RdiConfig cfg = config(0.25);
  cfg.theta = 1.0;
  SetValuedMap F = make_state_map(parse_map_expr("box(lo=0,hi=0)"));
  RdiSolution sol = rdi_fixed_point(F, make_one_form(parse_map_expr("constant(c=0.8)")), X, cfg);
  ASSERT_TRUE(sol.certified);
  EXPECT_LE(sol.iterations, 3);
  for (std::size_t i = 0; i < X.size(); ++i) EXPECT_NEAR(sol.z.y.values(0, static_cast<Eigen::Index>(i)), 0.25 + 0.8 * (X.x.values(0, static_cast<Eigen::Index>(i)) - X.x.values(0, 0)), 1e-13);
}

TEST(RdiFixedPoint, TimeSingletonWithZeroFormMatchesQuadrature) {
  RoughPath X = lifted(5, 10);
  auto f = [](double t) { return std::cos(3 * t); };
  SetValuedMap F = time_map([f](double t) -> SetValue { return cloud1({f(t)}); });
  RdiSolution sol = rdi_fixed_point(F, make_one_form(parse_map_expr("zero")), X, config(1.0));
  ASSERT_TRUE(sol.certified);
  // left-point sums of a C^1 function converge at rate h; the closed form sin(3t)/3 is the oracle
  double worst = 0;
  for (std::size_t i = 0; i < X.size(); ++i) worst = std::max(worst, std::abs(sol.z.y.values(0, static_cast<Eigen::Index>(i)) - 1.0 - std::sin(3 * X.times()[i]) / 3));
  EXPECT_LT(worst, 3.0 / 1024);
}

TEST(RdiFixedPoint, StationaryBoxSelection) {
  RoughPath X = lifted(6, 8);
  RdiConfig cfg = config(-0.4);
  cfg.mode = RdiMode::usc;
  SetValuedMap F = make_state_map(parse_map_expr("box(lo=-1,hi=1)"));
  RdiSolution sol = rdi_fixed_point(F, make_one_form(parse_map_expr("zero")), X, cfg);
  ASSERT_TRUE(sol.certified);
  EXPECT_TRUE((sol.z.y.values.array() == -0.4).all());
  EXPECT_EQ(sol.velocity.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sol.fixed_point_residual, 0.0);
  EXPECT_EQ(sol.inclusion_residual, 0.0);
  EXPECT_TRUE(sol.first_order_warning == false);
}

TEST(RdiResiduals, PerturbedVelocity) {
  RoughPath X = lifted(6, 6);
  RdiConfig cfg = config(0.5);
  SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0,lo=-0.2,hi=0.2)"));
  OneForm G = make_one_form(parse_map_expr("bounded_rational(a=0.1)"));
  RdiSolution sol = rdi_fixed_point(F, G, X, cfg);
  ASSERT_TRUE(sol.certified);
  RdiResiduals r = rdi_residuals(sol, F, G, X, cfg.xi);
  EXPECT_EQ(r.inclusion, 0.0);
  EXPECT_LT(r.fixed_point, cfg.fp_tol);
  sol.velocity.values(0, 7) += 0.003;
  EXPECT_NEAR(rdi_residuals(sol, F, G, X, cfg.xi).inclusion, 0.003, 1e-15);
}

TEST(RdiFixedPoint, UscModeNeedsConvexValues) {
  RoughPath X = lifted(6, 5);
  RdiConfig cfg = config(0);
  cfg.mode = RdiMode::usc;
  EXPECT_THROW(rdi_fixed_point(make_state_map(parse_map_expr("two_point(a=0,lo=-1,hi=1)")), make_one_form(parse_map_expr("zero")), X, cfg),
               std::invalid_argument);
}

TEST(RdiConfig, Validation) {
  RdiConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 0.6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RdiConfig{};
  c.M = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RdiConfig{};
  c.beta = 0.3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RdiFixedPoint, ZeroMapMatchesRdeSolve) {
  RoughPath X = lifted(3, 9);
  RdiConfig cfg = config(0.5);
  cfg.mode = RdiMode::usc;
  cfg.fp_tol = 1e-12;
  OneForm G = make_one_form(parse_map_expr("sine(a=0.3)"));
  RdiSolution sol = rdi_fixed_point(make_state_map(parse_map_expr("box(lo=0,hi=0)")), G, X, cfg);
  ASSERT_TRUE(sol.certified);
  RdeResult rde = rde_solve(G, X, cfg.xi);
  EXPECT_LT((sol.z.y.values - rde.z.y.values).cwiseAbs().maxCoeff(), 1e-10);
}
