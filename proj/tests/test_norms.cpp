#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "roughinc/norms.hpp"

using namespace roughinc;

namespace {

Path scalar_path(std::vector<double> t, std::vector<double> v) {
  Mat m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return Path(std::move(t), std::move(m));
}

Path uniform(std::vector<double> v) {
  std::vector<double> t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = double(i) / double(v.size() - 1);
  return scalar_path(t, std::move(v));
}

double brute_pvar(const Mat& v, double p) {
  const int n = static_cast<int>(v.cols());
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << (n - 2)); ++mask) {
    int prev = 0;
    double s = 0.0;
    for (int k = 1; k < n; ++k) {
      if (k < n - 1 && !(mask >> (k - 1) & 1u)) continue;
      s += std::pow((v.col(k) - v.col(prev)).norm(), p);
      prev = k;
    }
    best = std::max(best, s);
  }
  return std::pow(best, 1.0 / p);
}

double brute_holder(const Path& x, double a) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      best = std::max(best, (x.at(j) - x.at(i)).norm() / std::pow(x.times[j] - x.times[i], a));
  return best;
}

}  // namespace

TEST(PVariation, SmallExamples) {
  EXPECT_DOUBLE_EQ(p_variation(uniform({0, 1, 0}), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(p_variation(uniform({0, 1, 0}), 2.0), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(p_variation(uniform({0.5, 1, 1.5, 4}), 1.0), 3.5);
  EXPECT_EQ(p_variation(uniform({2, 2, 2}), 3.0), 0.0);
}

TEST(PVariation, MatchesEnumerationOnRandomPaths) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> pd(1.0, 3.5);
  for (int c = 0; c < 150; ++c) {
    int n = 2 + c % 11, d = 1 + c % 3;
    Mat v(d, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < d; ++i) v(i, j) = c % 4 == 0 ? std::round(nd(rng)) : nd(rng);
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = j;
    double p = pd(rng);
    double ex = brute_pvar(v, p);
    EXPECT_NEAR(p_variation(Path(t, v), p), ex, 1e-12 * std::max(1.0, ex)) << "case " << c;
  }
}

TEST(PVariation, WindowRestriction) {
  Path x = uniform({0, 3, 1, 2, 0});
  EXPECT_DOUBLE_EQ(p_variation(x, 1.0, IndexWindow{1, 3}), 3.0);
  EXPECT_DOUBLE_EQ(p_variation(x, 1.0, 0.25, 0.75), 3.0);
}

TEST(Holder, SmallExamples) {
  DyadicGrid g(1.0, 4);
  Mat lin(1, 17);
  for (int i = 0; i < 17; ++i) lin(0, i) = g.time(i);
  EXPECT_NEAR(holder_seminorm(Path::on_grid(g, lin), 1.0), 1.0, 1e-15);
  EXPECT_EQ(holder_seminorm(Path::on_grid(g, Mat::Constant(1, 17, 3.0)), 0.5), 0.0);
  EXPECT_DOUBLE_EQ(holder_seminorm(scalar_path({0, 0.25}, {0, 1}), 0.5), 2.0);
}

TEST(Holder, MatchesAllPairs) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  DyadicGrid g(1.0, 6);
  Mat v(2, 65);
  for (int i = 0; i < 65; ++i) v.col(i) << nd(rng), nd(rng);
  Path x = Path::on_grid(g, v);
  for (double a : {0.3, 0.5, 0.8, 1.0}) EXPECT_NEAR(holder_seminorm(x, a), brute_holder(x, a), 1e-12);
}

TEST(Oscillation, Examples) {
  Path x = uniform({0, 3, 1, 7});
  EXPECT_EQ(oscillation(x, std::size_t{0}, std::size_t{3}), 3.0);
  EXPECT_EQ(oscillation(x, std::size_t{2}, std::size_t{3}), 0.0);
  EXPECT_EQ(oscillation(uniform({4, 4, 4}), std::size_t{0}, std::size_t{3}), 0.0);
  EXPECT_EQ(oscillation(x, std::size_t{0}, std::size_t{4}), 7.0);
}

TEST(Interpolation, IdenticalPathsGiveZero) {
  Path x = uniform({0, 1, -1, 2});
  EXPECT_EQ(interpolation_qvar_bound(x, x, 2.0, 3.0), 0.0);
}

TEST(Interpolation, ShiftedPathFormula) {
  Path a = uniform({0, 1, -1, 2});
  Path b = a;
  const double c = 0.25;
  b.values.array() += c;
  const double p = 2.0, q = 3.0;
  const double V = p_variation(a, p);
  EXPECT_NEAR(interpolation_qvar_bound(a, b, p, q), std::pow(2 * c, (q - p) / q) * std::pow(2 * V, p / q), 1e-12);
}

TEST(Interpolation, DominatesDirectQVariation) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int c = 0; c < 50; ++c) {
    std::vector<double> u(10), w(10), diff(10);
    for (int i = 0; i < 10; ++i) {
      u[i] = nd(rng);
      w[i] = nd(rng);
      diff[i] = u[i] - w[i];
    }
    double bound = interpolation_qvar_bound(uniform(u), uniform(w), 1.5, 2.5);
    EXPECT_GE(bound + 1e-12, p_variation(uniform(diff), 2.5));
  }
}

TEST(Controls, PVariationControlIsSuperadditive) {
  Path x = uniform({0, 2, -1, 0.5, 3, 1, 1.5, -2, 0});
  PVariationControl w{&x, 2.0};
  for (std::size_t s = 0; s < x.size(); ++s)
    for (std::size_t u = s; u < x.size(); ++u)
      for (std::size_t t = u; t < x.size(); ++t) ASSERT_LE(w(s, u) + w(u, t), w(s, t) + 1e-12);
}
