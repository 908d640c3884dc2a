#include <gtest/gtest.h>

#include <cmath>

#include "roughinc/drivers.hpp"
#include "roughinc/map_expr.hpp"
#include "roughinc/rough.hpp"

using namespace roughinc;

namespace {

RoughPath fbm_lift(double H, std::uint64_t seed, int level, int dim) {
  DriverSpec s;
  s.hurst = H;
  s.seed = seed;
  s.level = level;
  s.dim = dim;
  return lift_piecewise_linear(sample_fbm(s), std::min(H - 0.05, 1.0));
}

OneForm constant_form(const Mat& C) {
  OneForm g;
  g.d = static_cast<int>(C.rows());
  g.l = static_cast<int>(C.cols());
  g.value = [C](const Vec&) { return C; };
  g.derivative = [C](const Vec&) { return Mat::Zero(C.size(), C.rows()); };
  return g;
}

}  // namespace

TEST(Lift, SegmentCarriesHalfTensorSquare) {
  DyadicGrid g(1.0, 1);
  Mat v(2, 3);
  v << 0, 1, 3, 0, 2, 1;
  RoughPath r = lift_piecewise_linear(Path::on_grid(g, v), 0.5);
  Vec d(2);
  d << 1, 2;
  EXPECT_TRUE(r.second[0].isApprox(0.5 * d * d.transpose()));
  EXPECT_EQ(r.second[0] - r.second[0].transpose(), Mat::Zero(2, 2));
}

TEST(Lift, RejectsExponentOutOfRange) {
  DyadicGrid g(1.0, 2);
  EXPECT_THROW(lift_piecewise_linear(analytic("line", g), 0.3), std::invalid_argument);
}

TEST(Chen, ExtendExamples) {
  RoughPath r = fbm_lift(0.4, 7, 5, 2);
  auto [z, zz] = chen_extend(r, std::size_t{4}, std::size_t{4});
  EXPECT_EQ(z.norm(), 0.0);
  EXPECT_EQ(zz.norm(), 0.0);
  auto [one, one2] = chen_extend(r, std::size_t{3}, std::size_t{4});
  EXPECT_EQ(one2, r.second[3]);
  // (t0,t3) directly vs (t0,t2) then (t2,t3) combined by the Chen formula
  auto [a, A] = chen_extend(r, std::size_t{0}, std::size_t{2});
  auto [b, B] = chen_extend(r, std::size_t{2}, std::size_t{3});
  auto [c, C] = chen_extend(r, std::size_t{0}, std::size_t{3});
  EXPECT_LT((C - (A + B + a * b.transpose())).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((c - a - b).norm(), 1e-15);
}

TEST(Chen, RelationOnAllTriplesOfAnFbmLift) {
  ChenReport rep = chen_report(fbm_lift(0.4, 11, 6, 3));
  EXPECT_LT(rep.chen_defect, 1e-12);
  EXPECT_LT(rep.antisymmetric_defect, 1e-14);
  EXPECT_LT(rep.symmetric_defect, 1e-12);
}

TEST(Chen, TimeOverloadMatchesIndices) {
  RoughPath r = fbm_lift(0.6, 2, 4, 2);
  auto [x1, X1] = chen_extend(r, 0.25, 0.75);
  auto [x2, X2] = chen_extend(r, std::size_t{4}, std::size_t{12});
  EXPECT_EQ(X1, X2);
  EXPECT_EQ(x1, x2);
}

TEST(Compose, IdentityConstantAndLinear) {
  RoughPath r = fbm_lift(0.45, 3, 6, 2);
  ControlledPath x = controlled_driver(r);
  SmoothMap id{[](const Vec& v) { return v; }, [](const Vec&) { return Mat::Identity(2, 2); }, 2, 2, 1.0, std::nullopt};
  ControlledPath a = compose_controlled(id, x, 2);
  EXPECT_EQ(a.y.values, x.y.values);
  EXPECT_EQ(a.yprime.values, x.yprime.values);

  SmoothMap cst{[](const Vec&) { return scalar(4.0); }, [](const Vec&) { return Mat::Zero(1, 2); }, 2, 1, 1.0, std::nullopt};
  ControlledPath b = compose_controlled(cst, x, 2);
  EXPECT_TRUE((b.y.values.array() == 4.0).all());
  EXPECT_TRUE((b.yprime.values.array() == 0.0).all());

  Mat A(3, 2);
  A << 1, 2, -1, 0.5, 0, 3;
  SmoothMap lin{[A](const Vec& v) { return Vec(A * v); }, [A](const Vec&) { return A; }, 2, 3, 1.0, std::nullopt};
  ControlledPath c = compose_controlled(lin, x, 2);
  for (std::size_t s : {std::size_t{0}, std::size_t{7}})
    for (std::size_t t : {std::size_t{20}, std::size_t{64}}) EXPECT_LT((remainder(c, r, s, t) - A * remainder(x, r, s, t)).norm(), 1e-12);
}

TEST(Compose, DomainExcursionThrows) {
  RoughPath r = lift_piecewise_linear(analytic("line", DyadicGrid(2.0, 3)), 0.5);
  SmoothMap f{[](const Vec& v) { return v; }, [](const Vec&) { return Mat::Identity(1, 1); }, 1, 1, 1.0, 1.0};
  EXPECT_THROW(compose_controlled(f, controlled_driver(r), 1), std::domain_error);
}

TEST(RoughIntegral, ConstantIntegrand) {
  RoughPath r = fbm_lift(0.4, 9, 8, 2);
  ControlledPath y;
  Mat c(1, 2);
  c << 0.5, -2;
  y.y = Path(r.times(), c.transpose().replicate(1, static_cast<Eigen::Index>(r.size())));
  y.yprime = Path(r.times(), Mat::Zero(4, static_cast<Eigen::Index>(r.size())));
  y.alpha = 0.35;
  y.theta = 1.0;
  ControlledPath I = rough_integral(y, r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(I.y.values(0, static_cast<Eigen::Index>(i)), (c * (r.x.at(i) - r.x.at(0)))(0), 1e-12);
}

TEST(RoughIntegral, DriverAgainstItself) {
  RoughPath r = lift_piecewise_linear(analytic("line", DyadicGrid(1.0, 6)), 0.5);
  ControlledPath I = rough_integral(controlled_driver(r), r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(I.y.values(0, static_cast<Eigen::Index>(i)), 0.5 * r.times()[i] * r.times()[i], 1e-14);
}

TEST(RoughIntegral, SmoothIntegrandAgainstQuadrature) {
  DyadicGrid g(1.0, 14);
  RoughPath r = lift_piecewise_linear(analytic("sine", g), 0.5);
  SmoothMap f{[](const Vec& v) { return scalar(std::exp(v[0])); }, [](const Vec& v) { return Mat::Constant(1, 1, std::exp(v[0])); }, 1, 1, 1.0, std::nullopt};
  ControlledPath I = rough_integral(compose_controlled(f, controlled_driver(r), 1), r);
  // int exp(sin t) cos t dt = exp(sin t) - 1, checked by fine trapezoid
  double trap = 0.0;
  const int N = 1 << 18;
  for (int k = 0; k < N; ++k) {
    double a = double(k) / N, b = double(k + 1) / N;
    trap += 0.5 * (std::exp(std::sin(a)) * std::cos(a) + std::exp(std::sin(b)) * std::cos(b)) / N;
  }
  EXPECT_NEAR(I.y.values(0, I.y.values.cols() - 1), trap, 1e-6);
}

TEST(RoughIntegral, NeedsEnoughRegularity) {
  RoughPath r = fbm_lift(0.4, 1, 4, 1);
  ControlledPath y = controlled_driver(r);
  y.theta = 0.5;
  y.alpha = 0.4;
  EXPECT_THROW(rough_integral(y, r), std::invalid_argument);
}

TEST(Rde, ZeroFormFollowsDrift) {
  RoughPath r = fbm_lift(0.45, 4, 7, 1);
  Path drift = analytic("polynomial", DyadicGrid(1.0, 7));
  RdeResult res = rde_solve(make_one_form(parse_map_expr("zero")), r, scalar(0.5), &drift);
  ASSERT_TRUE(res.converged);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(res.z.y.values(0, static_cast<Eigen::Index>(i)), 0.5 + drift.values(0, static_cast<Eigen::Index>(i)), 1e-15);
}

TEST(Rde, ConstantFormIsOneStep) {
  RoughPath r = fbm_lift(0.45, 4, 7, 2);
  Mat C(2, 2);
  C << 1, -0.5, 0.25, 2;
  Vec xi(2);
  xi << 1, -1;
  RdeResult res = rde_solve(constant_form(C), r, xi);
  ASSERT_TRUE(res.converged);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_LT((res.z.y.at(i) - xi - C * (r.x.at(i) - r.x.at(0))).norm(), 1e-12);
}

TEST(Rde, LinearFormExponentialOfSine) {
  DyadicGrid g(1.0, 14);
  RoughPath r = lift_piecewise_linear(analytic("sine", g), 0.5);
  RdeResult res = rde_solve(make_one_form(parse_map_expr("linear(a=1)")), r, scalar(2.0));
  ASSERT_TRUE(res.converged);
  double worst = 0;
  for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(res.z.y.values(0, static_cast<Eigen::Index>(i)) - 2.0 * std::exp(std::sin(r.times()[i]))));
  EXPECT_LT(worst, 1e-5);
}

TEST(Rde, RoughLinearSolutionIsExponentialOfDriver) {
  // for a geometric lift, dy = y dX solves to y = xi exp(X_t - X_0) up to discretisation
  RoughPath r = fbm_lift(0.45, 21, 12, 1);
  RdeResult res = rde_solve(make_one_form(parse_map_expr("linear(a=0.5)")), r, scalar(1.0));
  ASSERT_TRUE(res.converged);
  double worst = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    worst = std::max(worst, std::abs(res.z.y.values(0, static_cast<Eigen::Index>(i)) - std::exp(0.5 * (r.x.values(0, static_cast<Eigen::Index>(i)) - r.x.values(0, 0)))));
  EXPECT_LT(worst, 1e-3);
}
