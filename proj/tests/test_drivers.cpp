#include <gtest/gtest.h>

#include <cmath>

#include "roughinc/drivers.hpp"
#include "roughinc/norms.hpp"

using namespace roughinc;

namespace {

struct Moments {
  double var_half = 0, var_one = 0, cov = 0;
};

// Sample moments of (x_{1/2}, x_1) over n paths.
Moments moments(const FbmSampler& smp, int n, std::uint64_t base) {
  double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
  for (int i = 0; i < n; ++i) {
    NormalStream ns(base + static_cast<std::uint64_t>(i));
    Vec v = smp.sample_component(ns);
    double h = v[(v.size() - 1) / 2], o = v[v.size() - 1];
    a += h, b += o, aa += h * h, bb += o * o, ab += h * o;
  }
  Moments m;
  m.var_half = (aa - a * a / n) / (n - 1);
  m.var_one = (bb - b * b / n) / (n - 1);
  m.cov = (ab - a * b / n) / (n - 1);
  return m;
}

}  // namespace

TEST(Normals, ReproducibleAndStandard) {
  NormalStream a(3), b(3);
  double s = 0, ss = 0;
  for (int i = 0; i < 20000; ++i) {
    double x = a();
    ASSERT_EQ(x, b());
    s += x;
    ss += x * x;
  }
  EXPECT_NEAR(s / 20000, 0.0, 4 / std::sqrt(20000.0));
  EXPECT_NEAR(ss / 20000, 1.0, 4 * std::sqrt(2.0 / 20000));
}

TEST(Fbm, BrownianIncrementsAreUncorrelated) {
  FbmSampler smp(DyadicGrid(1.0, 4), 0.5);
  const int N = 10000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < N; ++i) {
    NormalStream ns(77 + static_cast<std::uint64_t>(i));
    Vec v = smp.sample_component(ns);
    double a = v[4] - v[0], b = v[16] - v[8];
    sa += a, sb += b, saa += a * a, sbb += b * b, sab += a * b;
  }
  double cov = sab / N - sa * sb / N / N;
  double corr = cov / std::sqrt((saa / N - sa * sa / N / N) * (sbb / N - sb * sb / N / N));
  EXPECT_LT(std::abs(corr), 0.05);
}

TEST(Fbm, CovarianceMatchesFormulaForBothMethods) {
  const int N = 10000;
  const double se = std::sqrt(2.0 / (N - 1));
  for (FbmMethod method : {FbmMethod::cholesky, FbmMethod::circulant})
    for (double H : {0.3, 0.45, 0.8}) {
      FbmSampler smp(DyadicGrid(1.0, 6), H, method);
      Moments m = moments(smp, N, 500);
      EXPECT_LE(std::abs(m.var_one - 1.0), 3 * se) << "H=" << H;
      double vh = std::pow(0.5, 2 * H);
      EXPECT_LE(std::abs(m.var_half - vh), 3 * se * vh) << "H=" << H;
      // covariance estimator standard error sqrt((vh + c^2)/N)
      double c = fbm_covariance(0.5, 1.0, H);
      EXPECT_LE(std::abs(m.cov - c), 4 * std::sqrt((vh + c * c) / N)) << "H=" << H;
    }
}

TEST(Fbm, HorizonScaling) {
  FbmSampler smp(DyadicGrid(4.0, 5), 0.7, FbmMethod::circulant);
  Moments m = moments(smp, 8000, 9);
  double v = std::pow(4.0, 1.4);
  EXPECT_LE(std::abs(m.var_one - v), 3 * std::sqrt(2.0 / 7999) * v);
}

TEST(Fbm, SameSeedSamePath) {
  DriverSpec s;
  s.hurst = 0.35;
  s.seed = 8;
  s.level = 9;
  s.dim = 2;
  EXPECT_EQ(sample_fbm(s).values, sample_fbm(s).values);
  DriverSpec t = s;
  t.seed = 9;
  EXPECT_NE(sample_fbm(s).values, sample_fbm(t).values);
  s.level = 14;
  EXPECT_EQ(sample_fbm(s).values, sample_fbm(s).values);
}

TEST(Fbm, AutomaticMethodSwitchesAboveCap) {
  EXPECT_EQ(FbmSampler(DyadicGrid(1.0, kCholeskyLevelCap), 0.5).method(), FbmMethod::cholesky);
  EXPECT_EQ(FbmSampler(DyadicGrid(1.0, kCholeskyLevelCap + 1), 0.5).method(), FbmMethod::circulant);
}

TEST(Fbm, HolderSeminormStableAcrossLevels) {
  DriverSpec s;
  s.hurst = 0.6;
  s.seed = 1;
  double prev = 0;
  for (int m = 8; m <= 12; m += 2) {
    s.level = m;
    double h = holder_seminorm(sample_fbm(s), s.hurst - 0.05);
    EXPECT_TRUE(std::isfinite(h));
    if (prev > 0) {
      EXPECT_LT(h / prev, 3.0);
    }
    prev = h;
  }
}

TEST(Fbm, RejectsBadHurst) {
  DriverSpec s;
  s.hurst = 1.0;
  EXPECT_THROW(sample_fbm(s), std::invalid_argument);
}

TEST(Analytic, ClosedForms) {
  DyadicGrid g(1.0, 5);
  Path line = analytic("line", g), sine = analytic("sine", g), poly = analytic("polynomial", g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double t = g.time(static_cast<std::int64_t>(i));
    EXPECT_EQ(line.values(0, static_cast<Eigen::Index>(i)), t);
    EXPECT_EQ(sine.values(0, static_cast<Eigen::Index>(i)), std::sin(t));
    EXPECT_EQ(poly.values(0, static_cast<Eigen::Index>(i)), t * t);
  }
  EXPECT_THROW(analytic("circle", g, 1), std::invalid_argument);
  EXPECT_THROW(analytic("spiral", g), std::invalid_argument);
}

TEST(Fourier, ZeroCoefficientsGiveZeroPath) {
  DyadicGrid g(1.0, 6);
  Path p = fourier_series(g, 0.5, Mat::Zero(2, 10), Mat::Zero(2, 10));
  EXPECT_EQ(p.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fourier, SingleModeIsACosine) {
  DyadicGrid g(1.0, 6);
  Path p = fourier_series(g, 0.5, Mat::Ones(1, 1), Mat::Zero(1, 1));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(p.values(0, static_cast<Eigen::Index>(i)), std::cos(2 * M_PI * g.time(static_cast<std::int64_t>(i))), 1e-14);
}

TEST(Fourier, SeededSampleIsDeterministic) {
  DriverSpec s;
  s.kind = DriverKind::fourier;
  s.seed = 4;
  s.level = 7;
  EXPECT_EQ(sample_driver(s).values, sample_driver(s).values);
}
