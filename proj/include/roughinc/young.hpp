#pragma once

// Sewing of two-index germs on dyadic grids, the Young integral, and a
// Picard solver for Young differential equations dz = sigma(z) dx.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughinc/path.hpp"

namespace roughinc {

// mu(s,t) on pairs of grid indices, with declared exponents.
struct Germ {
  std::function<Vec(std::size_t, std::size_t)> eval;
  int dim = 1;
  double alpha1 = 1.0;
  double alpha2 = 0.0;
};

namespace detail {

inline void check_germ(const Germ& g, const DyadicGrid& grid) {
  if (!(g.alpha1 + g.alpha2 > 1.0)) throw std::invalid_argument("sewing needs alpha1 + alpha2 > 1");
  const std::size_t last = grid.size() - 1;
  for (std::size_t i : {std::size_t{0}, last / 2, last}) {
    if (g.eval(i, i).norm() != 0.0) throw std::invalid_argument("germ does not vanish on the diagonal");
  }
}

}  // namespace detail

// Integral of mu along pi^(n) of the whole grid interval: sum of mu over
// consecutive pairs of the level-n sub-grid.
inline Vec riemann_sum(const Germ& g, const DyadicGrid& grid, int n) {
  if (n < 0 || n > grid.level()) throw std::invalid_argument("riemann_sum: level out of range");
  const std::size_t stride = std::size_t{1} << (grid.level() - n);
  Vec acc = Vec::Zero(g.dim);
  for (std::size_t i = 0; i + stride < grid.size(); i += stride) acc += g.eval(i, i + stride);
  return acc;
}

// Total compensated Riemann sums at levels 0..grid.level(), the convergence
// record of the sewing map.
inline std::vector<Vec> sewing_levels(const Germ& g, const DyadicGrid& grid) {
  detail::check_germ(g, grid);
  std::vector<Vec> out;
  for (int n = 0; n <= grid.level(); ++n) out.push_back(riemann_sum(g, grid, n));
  return out;
}

// t -> I_0^t(mu) at the grid points, from the finest available sums. The
// result is additive on the grid by construction.
inline Path sew(const Germ& g, const DyadicGrid& grid) {
  detail::check_germ(g, grid);
  Mat out(g.dim, static_cast<Eigen::Index>(grid.size()));
  out.col(0).setZero();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i + 1)) = out.col(static_cast<Eigen::Index>(i)) + g.eval(i, i + 1);
  }
  return Path::on_grid(grid, std::move(out));
}

// Largest |mu_ts - mu_tu - mu_us| / |t-s|^(alpha1+alpha2) over `samples`
// random triples. Opt-in diagnostic; the sewing map itself never calls it.
inline double sewing_defect_ratio(const Germ& g, const DyadicGrid& grid, int samples, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    std::size_t a = pick(gen), b = pick(gen), c = pick(gen);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (a == c) continue;
    double d = (g.eval(a, c) - g.eval(a, b) - g.eval(b, c)).norm();
    worst = std::max(worst, d / std::pow(grid.time(static_cast<std::int64_t>(c)) - grid.time(static_cast<std::int64_t>(a)), g.alpha1 + g.alpha2));
  }
  return worst;
}

struct YoungOptions {
  // Declared regularity of the integrand (q-variation) and driver (Hölder).
  // Zero means "not declared"; the budget 1/q + alpha > 1 is only checked
  // when both are given.
  double integrand_q = 0.0;
  double driver_alpha = 0.0;
  bool allow_budget_violation = false;
};

namespace detail {

inline int integral_dim(const Path& y, const Path& x) {
  if (x.dim() == 0 || y.dim() % x.dim() != 0) {
    throw std::invalid_argument("young_integral: integrand must hold d x l matrices for an l-dimensional driver");
  }
  return y.dim() / x.dim();
}

inline void check_budget(const YoungOptions& opt) {
  if (opt.integrand_q > 0.0 && opt.driver_alpha > 0.0 && !(1.0 / opt.integrand_q + opt.driver_alpha > 1.0)) {
    if (!opt.allow_budget_violation) throw std::invalid_argument("Young regime needs 1/q + alpha > 1");
  }
}

}  // namespace detail

// Germ of int y dx. Step integrands use y_s x_{s,t}, which makes the sum
// over the integrand's own cells exact. Piecewise-linear integrands use
// (y_s + y_t)/2 x_{s,t}, the exact Riemann-Stieltjes integral of one linear
// piece against another; it differs from y_s x_{s,t} by a term of order
// 1/q + alpha > 1, so the sewn limit is the same.
inline Germ young_germ(const Path& y, const Path& x) {
  require_same_times(y, x, "young_integral");
  const int l = x.dim();
  const int d = detail::integral_dim(y, x);
  const bool step = y.interpolation == Interpolation::step;
  Germ g;
  g.dim = d;
  g.eval = [&y, &x, d, l, step](std::size_t s, std::size_t t) -> Vec {
    Vec dx = x.at(t) - x.at(s);
    Mat ys = as_matrix(y.at(s), d, l);
    if (step || s == t) return ys * dx;
    return 0.5 * (ys + as_matrix(y.at(t), d, l)) * dx;
  };
  return g;
}

// int_0^. y_u dx_u at the sample times. y holds flattened column-major d x l
// matrices (or scalars when d = l = 1).
inline Path young_integral(const Path& y, const Path& x, const YoungOptions& opt = {}) {
  detail::check_budget(opt);
  require_same_times(y, x, "young_integral");
  const int l = x.dim();
  const int d = detail::integral_dim(y, x);
  const bool step = y.interpolation == Interpolation::step;
  Mat out(d, static_cast<Eigen::Index>(x.size()));
  out.col(0).setZero();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    Vec dx = x.at(i + 1) - x.at(i);
    Mat ys = as_matrix(y.at(i), d, l);
    Vec inc = step ? Vec(ys * dx) : Vec(0.5 * (ys + as_matrix(y.at(i + 1), d, l)) * dx);
    out.col(static_cast<Eigen::Index>(i + 1)) = out.col(static_cast<Eigen::Index>(i)) + inc;
  }
  Path p(x.times, std::move(out));
  p.grid = x.grid;
  return p;
}

// Coefficient sigma: R^d -> L(R^l, R^d), returned as a d x l matrix.
using MatrixField = std::function<Mat(const Vec&)>;

struct YoungOdeOptions {
  double tol = 1e-12;
  int max_iterations = 200;
  // Number of window halvings allowed when Picard stalls.
  int max_halvings = 12;
};

struct YoungOdeResult {
  Path z;
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;
  std::size_t windows = 0;
};

namespace detail {

// Picard iteration for z on sample indices [a, b] with z_a fixed. Returns
// false when the iterates stop contracting.
inline bool young_picard_window(const MatrixField& sigma, const Path& x, Mat& z, std::size_t a, std::size_t b, const YoungOdeOptions& opt,
                                int& iterations, double& change) {
  const auto d = z.rows();
  const int l = x.dim();
  for (std::size_t j = a + 1; j <= b; ++j) z.col(static_cast<Eigen::Index>(j)) = z.col(static_cast<Eigen::Index>(a));
  std::vector<Mat> s(b - a + 1);
  double prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    ++iterations;
    for (std::size_t j = a; j <= b; ++j) {
      s[j - a] = sigma(z.col(static_cast<Eigen::Index>(j)));
      if (s[j - a].rows() != d || s[j - a].cols() != l) throw std::invalid_argument("coefficient has the wrong shape");
    }
    double diff = 0.0;
    Vec acc = z.col(static_cast<Eigen::Index>(a));
    for (std::size_t j = a; j < b; ++j) {
      Vec dx = x.at(j + 1) - x.at(j);
      acc += 0.5 * (s[j - a] + s[j + 1 - a]) * dx;
      auto col = z.col(static_cast<Eigen::Index>(j + 1));
      diff = std::max(diff, (acc - col).cwiseAbs().maxCoeff());
      col = acc;
    }
    change = diff;
    if (!std::isfinite(diff)) return false;
    if (diff < opt.tol) return true;
    if (diff >= prev) {
      if (++growth >= 3) return false;
    } else {
      growth = 0;
    }
    prev = diff;
  }
  return false;
}

}  // namespace detail

// Fixed point of z = xi + int sigma(z) dx. Picard runs undamped on a window;
// when it stalls the window is halved, and solved windows are concatenated.
inline YoungOdeResult young_ode_solve(const MatrixField& sigma, const Path& x, const Vec& xi, const YoungOdeOptions& opt = {}) {
  if (x.size() < 2) throw std::invalid_argument("young_ode_solve: driver needs at least two samples");
  YoungOdeResult res;
  Mat z(xi.size(), static_cast<Eigen::Index>(x.size()));
  z.col(0) = xi;
  const std::size_t cells = x.size() - 1;
  std::size_t width = cells;
  std::size_t a = 0;
  int halvings = 0;
  res.converged = true;
  while (a < cells) {
    std::size_t b = std::min(cells, a + width);
    Mat trial = z;
    double change = 0.0;
    if (detail::young_picard_window(sigma, x, trial, a, b, opt, res.iterations, change)) {
      z = std::move(trial);
      res.last_change = std::max(res.last_change, change);
      ++res.windows;
      a = b;
      continue;
    }
    if (halvings >= opt.max_halvings || width == 1) {
      z = std::move(trial);
      res.converged = false;
      res.last_change = change;
      ++res.windows;
      a = b;
      continue;
    }
    width = std::max<std::size_t>(1, width / 2);
    ++halvings;
  }
  res.z = Path(x.times, std::move(z));
  res.z.grid = x.grid;
  return res;
}

}  // namespace roughinc
