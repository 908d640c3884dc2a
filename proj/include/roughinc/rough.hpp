#pragma once

// Level-2 rough paths over a sampled driver, controlled paths, composition
// with smooth maps, the rough integral and a Picard RDE solver.
//
// Convention: XX_{st} = int_s^t X_{su} (x) dX_u, so (XX_{st})(j,i) is
// int X^j dX^i and Chen reads XX_{rt} = XX_{rs} + XX_{st} + X_{rs} X_{st}^T.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughinc/norms.hpp"
#include "roughinc/path.hpp"

namespace roughinc {

struct RoughPath {
  Path x;
  // second[i] = XX over [t_i, t_{i+1}].
  std::vector<Mat> second;
  double alpha = 0.5;

  std::size_t size() const { return x.size(); }
  int dim() const { return x.dim(); }
  const std::vector<double>& times() const { return x.times; }
};

inline RoughPath lift_piecewise_linear(const Path& x, double alpha) {
  if (!(alpha > 1.0 / 3.0 && alpha <= 1.0)) throw std::invalid_argument("rough path exponent must lie in (1/3, 1]");
  RoughPath r;
  r.x = x;
  r.alpha = alpha;
  r.second.reserve(x.size() > 0 ? x.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    Vec dx = x.at(i + 1) - x.at(i);
    r.second.push_back(0.5 * dx * dx.transpose());
  }
  return r;
}

// (X_{st}, XX_{st}) by left-to-right Chen accumulation over sample indices.
inline std::pair<Vec, Mat> chen_extend(const RoughPath& r, std::size_t s, std::size_t t) {
  if (s > t) throw std::invalid_argument("chen_extend: s > t");
  if (t >= r.size()) throw std::invalid_argument("chen_extend: index outside the path");
  const int l = r.dim();
  Vec inc = Vec::Zero(l);
  Mat area = Mat::Zero(l, l);
  for (std::size_t k = s; k < t; ++k) {
    Vec dx = r.x.at(k + 1) - r.x.at(k);
    area += r.second[k] + inc * dx.transpose();
    inc += dx;
  }
  return {inc, area};
}

inline std::pair<Vec, Mat> chen_extend(const RoughPath& r, double s, double t) {
  if (s > t) throw std::invalid_argument("chen_extend: s > t");
  return chen_extend(r, r.x.index_of(s), r.x.index_of(t));
}

// Table of XX_{st} for all sample pairs s <= t, stored per start index.
class ChenTable {
 public:
  explicit ChenTable(const RoughPath& r) : n_(r.size()), l_(r.dim()) {
    data_.assign(n_ * n_ * static_cast<std::size_t>(l_ * l_), 0.0);
    for (std::size_t s = 0; s < n_; ++s) {
      Vec inc = Vec::Zero(l_);
      Mat area = Mat::Zero(l_, l_);
      for (std::size_t t = s + 1; t < n_; ++t) {
        Vec dx = r.x.at(t) - r.x.at(t - 1);
        area += r.second[t - 1] + inc * dx.transpose();
        inc += dx;
        std::copy(area.data(), area.data() + l_ * l_, slot(s, t));
      }
    }
  }

  Eigen::Map<const Mat> operator()(std::size_t s, std::size_t t) const { return Eigen::Map<const Mat>(slot(s, t), l_, l_); }

 private:
  double* slot(std::size_t s, std::size_t t) { return data_.data() + (s * n_ + t) * static_cast<std::size_t>(l_ * l_); }
  const double* slot(std::size_t s, std::size_t t) const { return data_.data() + (s * n_ + t) * static_cast<std::size_t>(l_ * l_); }

  std::size_t n_;
  int l_;
  std::vector<double> data_;
};

struct ChenReport {
  // max |XX_rt - XX_rs - XX_st - X_rs (x) X_st| over all sample triples r < s < t
  double chen_defect = 0.0;
  // same, restricted to the antisymmetric parts
  double antisymmetric_defect = 0.0;
  // max |Sym(XX_st) - X_st (x) X_st / 2| over all pairs
  double symmetric_defect = 0.0;
};

// Exhaustive check over all triples; O(n^3 l^2) time and O(n^2 l^2) memory.
inline ChenReport chen_report(const RoughPath& r) {
  ChenTable table(r);
  const std::size_t n = r.size();
  const int l = r.dim();
  ChenReport rep;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      Vec dx = r.x.at(t) - r.x.at(s);
      Mat a = table(s, t);
      Mat sym = 0.5 * (a + a.transpose()) - 0.5 * dx * dx.transpose();
      rep.symmetric_defect = std::max(rep.symmetric_defect, sym.cwiseAbs().maxCoeff());
    }
  }
  const auto ll = static_cast<std::size_t>(l);
  std::vector<double> dxab(ll), dxbc(ll), def(ll * ll);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t i = 0; i < ll; ++i) dxab[i] = r.x.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) - r.x.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
      const double* ab = table(a, b).data();
      for (std::size_t c = b + 1; c < n; ++c) {
        for (std::size_t i = 0; i < ll; ++i) dxbc[i] = r.x.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) - r.x.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
        const double* ac = table(a, c).data();
        const double* bc = table(b, c).data();
        // column-major storage: entry (i, j) sits at i + j l
        for (std::size_t j = 0; j < ll; ++j)
          for (std::size_t i = 0; i < ll; ++i) {
            std::size_t k = i + j * ll;
            def[k] = ac[k] - ab[k] - bc[k] - dxab[i] * dxbc[j];
            rep.chen_defect = std::max(rep.chen_defect, std::abs(def[k]));
          }
        for (std::size_t j = 0; j < ll; ++j)
          for (std::size_t i = 0; i < j; ++i)
            rep.antisymmetric_defect = std::max(rep.antisymmetric_defect, 0.5 * std::abs(def[i + j * ll] - def[j + i * ll]));
      }
    }
  }
  return rep;
}

// Validation pass for externally supplied second levels: worst symmetric
// part defect on consecutive intervals.
inline double geometricity_defect(const RoughPath& r) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    Vec dx = r.x.at(i + 1) - r.x.at(i);
    const Mat& a = r.second[i];
    worst = std::max(worst, (0.5 * (a + a.transpose()) - 0.5 * dx * dx.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

// (y, y') with y_{st} = y'_s X_{st} + R_{st}. yprime holds flattened
// column-major k x l matrices where k = y.dim().
struct ControlledPath {
  Path y;
  Path yprime;
  double alpha = 0.5;
  double theta = 1.0;

  int dim() const { return y.dim(); }
};

inline Vec remainder(const ControlledPath& c, const RoughPath& r, std::size_t s, std::size_t t) {
  const int l = r.dim();
  Vec dx = r.x.at(t) - r.x.at(s);
  return c.y.at(t) - c.y.at(s) - as_matrix(c.yprime.at(s), c.dim(), l) * dx;
}

// max over sample pairs of |R_{st}| / (t-s)^theta.
inline double remainder_holder(const ControlledPath& c, const RoughPath& r, double theta) {
  double worst = 0.0;
  const auto& ts = r.times();
  for (std::size_t s = 0; s < r.size(); ++s)
    for (std::size_t t = s + 1; t < r.size(); ++t)
      worst = std::max(worst, remainder(c, r, s, t).norm() / std::pow(ts[t] - ts[s], theta));
  return worst;
}

// f: R^d -> R^k with Jacobian (k x d) and a Hölder exponent for Df.
struct SmoothMap {
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> jacobian;
  int in_dim = 1;
  int out_dim = 1;
  double derivative_holder = 1.0;
  // Inputs are expected in the ball of this radius when set.
  std::optional<double> domain_radius;
};

// G: R^d -> L(R^l, R^d) with its derivative and declared bounds.
struct OneForm {
  std::function<Mat(const Vec&)> value;
  // Jacobian of the column-major flattening of value, a (d l) x d matrix.
  std::function<Mat(const Vec&)> derivative;
  int d = 1;
  int l = 1;
  // 1 for C_b^{1,gamma}, 2 for C_b^{2,gamma}.
  int order = 2;
  double gamma = 1.0;
  double sup_value = std::numeric_limits<double>::infinity();
  double sup_derivative = std::numeric_limits<double>::infinity();
  double holder_top = std::numeric_limits<double>::infinity();

  SmoothMap as_map() const {
    SmoothMap m;
    auto v = value;
    int dd = d, ll = l;
    m.value = [v, dd, ll](const Vec& y) -> Vec {
      Mat g = v(y);
      if (g.rows() != dd || g.cols() != ll) throw std::invalid_argument("one-form value has the wrong shape");
      return flatten(g);
    };
    m.jacobian = derivative;
    m.in_dim = d;
    m.out_dim = d * l;
    m.derivative_holder = gamma;
    return m;
  }
};

// (f(y), Df(y) y'); throws when y leaves the declared domain of f.
inline ControlledPath compose_controlled(const SmoothMap& f, const ControlledPath& yc, int l) {
  const std::size_t n = yc.y.size();
  if (yc.dim() != f.in_dim) throw std::invalid_argument("compose_controlled: dimension mismatch");
  Mat fy(f.out_dim, static_cast<Eigen::Index>(n));
  Mat fyp(f.out_dim * l, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Vec yi = yc.y.at(i);
    if (f.domain_radius && yi.norm() > *f.domain_radius) {
      throw std::domain_error("compose_controlled: path leaves the declared domain of f");
    }
    fy.col(static_cast<Eigen::Index>(i)) = f.value(yi);
    Mat j = f.jacobian(yi);
    if (j.rows() != f.out_dim || j.cols() != f.in_dim) throw std::invalid_argument("compose_controlled: Jacobian has the wrong shape");
    fyp.col(static_cast<Eigen::Index>(i)) = flatten(j * as_matrix(yc.yprime.at(i), yc.dim(), l));
  }
  ControlledPath out;
  out.y = Path(yc.y.times, std::move(fy));
  out.y.grid = yc.y.grid;
  out.yprime = Path(yc.y.times, std::move(fyp));
  out.yprime.grid = yc.y.grid;
  out.alpha = yc.alpha;
  out.theta = std::min(yc.theta, yc.alpha * (1.0 + f.derivative_holder));
  return out;
}

// The driver itself as a controlled path: (X, I).
inline ControlledPath controlled_driver(const RoughPath& r) {
  const int l = r.dim();
  Mat id = Mat::Identity(l, l);
  Mat yp(l * l, static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) yp.col(static_cast<Eigen::Index>(i)) = flatten(id);
  ControlledPath c;
  c.y = r.x;
  c.yprime = Path(r.times(), std::move(yp));
  c.yprime.grid = r.x.grid;
  c.alpha = r.alpha;
  c.theta = 1.0;
  return c;
}

namespace detail {

// Y'_s XX_{st} for Y' a (d l) x l matrix: sum_{i,j} Y'_{(a,i),j} XX_{j,i}.
inline Vec contract_second(const Mat& yp, const Mat& xx, int d, int l) {
  Vec out = Vec::Zero(d);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      for (int a = 0; a < d; ++a) out[a] += yp(a + d * i, j) * xx(j, i);
  return out;
}

inline Vec rough_germ(const ControlledPath& yc, const RoughPath& r, int d, std::size_t s, std::size_t, const Vec& dx, const Mat& xx) {
  const int l = r.dim();
  return as_matrix(yc.y.at(s), d, l) * dx + contract_second(as_matrix(yc.yprime.at(s), d * l, l), xx, d, l);
}

}  // namespace detail

// int y dX with germ y_s X_{st} + y'_s XX_{st}. The integrand y holds
// flattened d x l matrices; the result is (int y dX, y).
inline ControlledPath rough_integral(const ControlledPath& yc, const RoughPath& r) {
  const int l = r.dim();
  if (yc.y.dim() % l != 0) throw std::invalid_argument("rough_integral: integrand must hold d x l matrices");
  if (yc.yprime.dim() != yc.y.dim() * l) throw std::invalid_argument("rough_integral: derivative has the wrong shape");
  if (!(yc.alpha + yc.theta > 1.0)) throw std::invalid_argument("rough_integral needs alpha + theta > 1");
  require_same_times(yc.y, r.x, "rough_integral");
  const int d = yc.y.dim() / l;
  Mat out(d, static_cast<Eigen::Index>(r.size()));
  out.col(0).setZero();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    Vec dx = r.x.at(i + 1) - r.x.at(i);
    out.col(static_cast<Eigen::Index>(i + 1)) = out.col(static_cast<Eigen::Index>(i)) + detail::rough_germ(yc, r, d, i, i + 1, dx, r.second[i]);
  }
  ControlledPath res;
  res.y = Path(r.times(), std::move(out));
  res.y.grid = r.x.grid;
  res.yprime = yc.y;
  res.alpha = r.alpha;
  res.theta = 2.0 * r.alpha;
  return res;
}

// max over dyadic-consecutive windows [s,t] of
// |int_s^t y dX - y_s X_st - y'_s XX_st| / (t-s)^(alpha+theta).
inline double rough_local_constant(const ControlledPath& yc, const RoughPath& r, const ControlledPath& integral) {
  const int l = r.dim();
  const int d = yc.y.dim() / l;
  const std::size_t cells = r.size() - 1;
  const double expo = yc.alpha + yc.theta;
  double worst = 0.0;
  for (std::size_t width = 2; width <= cells; width *= 2) {
    for (std::size_t s = 0; s + width <= cells; s += width) {
      auto [dx, xx] = chen_extend(r, s, s + width);
      Vec local = integral.y.at(s + width) - integral.y.at(s) - detail::rough_germ(yc, r, d, s, s + width, dx, xx);
      worst = std::max(worst, local.norm() / std::pow(r.times()[s + width] - r.times()[s], expo));
    }
  }
  return worst;
}

// Integrand (G(y), DG(y) y') of int G(y) dX.
inline ControlledPath one_form_integrand(const OneForm& g, const Path& y, const Path& yprime, double alpha, double theta) {
  ControlledPath c;
  c.y = y;
  c.yprime = yprime;
  c.alpha = alpha;
  c.theta = theta;
  return compose_controlled(g.as_map(), c, g.l);
}

struct RdeOptions {
  double tol = 1e-13;
  int max_iterations = 400;
  int max_halvings = 12;
};

struct RdeResult {
  ControlledPath z;
  bool converged = false;
  int iterations = 0;
  // sup |z - Picard(z)| over the whole path.
  double residual = 0.0;
  // sup |z| on the solution, compared post hoc with the one-form bounds.
  double range = 0.0;
  bool bound_excursion = false;
  std::size_t windows = 0;
};

// Picard map (y, y') -> xi + drift_{0,.} + int G(y) dX with integrand
// derivative DG(y) y', over the whole path.
inline Path picard_map(const OneForm& g, const RoughPath& r, const Vec& xi, const Path* drift, const Path& y, const Path& yprime) {
  ControlledPath integrand = one_form_integrand(g, y, yprime, r.alpha, 2.0 * r.alpha);
  ControlledPath integral = rough_integral(integrand, r);
  Mat v = integral.y.values;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    v.col(i) += xi;
    if (drift) v.col(i) += drift->values.col(i) - drift->values.col(0);
  }
  Path out(r.times(), std::move(v));
  out.grid = r.x.grid;
  return out;
}

inline Path one_form_path(const OneForm& g, const Path& y) {
  Mat v(g.d * g.l, static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = flatten(g.value(y.at(i)));
  Path out(y.times, std::move(v));
  out.grid = y.grid;
  return out;
}

namespace detail {

inline bool rde_picard_window(const OneForm& g, const RoughPath& r, const Path* drift, Mat& y, std::size_t a, std::size_t b, const RdeOptions& opt,
                              int& iterations) {
  const int d = g.d;
  const int l = g.l;
  for (std::size_t j = a + 1; j <= b; ++j) y.col(static_cast<Eigen::Index>(j)) = y.col(static_cast<Eigen::Index>(a));
  double prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    ++iterations;
    double diff = 0.0;
    Vec acc = y.col(static_cast<Eigen::Index>(a));
    Vec cur = acc;
    for (std::size_t j = a; j < b; ++j) {
      Vec yj = cur;
      Mat gy = g.value(yj);
      Mat yp = g.derivative(yj) * gy;
      Vec dx = r.x.at(j + 1) - r.x.at(j);
      acc += gy * dx + contract_second(yp, r.second[j], d, l);
      if (drift) acc += drift->at(j + 1) - drift->at(j);
      auto col = y.col(static_cast<Eigen::Index>(j + 1));
      cur = col;
      diff = std::max(diff, (acc - col).cwiseAbs().maxCoeff());
      col = acc;
    }
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

// Solves y = xi + drift_{0,t} + int_0^t G(y) dX by Picard iteration on
// windows, halving the window when the iteration stalls. The solution
// carries y' = G(y).
inline RdeResult rde_solve(const OneForm& g, const RoughPath& r, const Vec& xi, const Path* drift = nullptr, const RdeOptions& opt = {}) {
  if (xi.size() != g.d) throw std::invalid_argument("rde_solve: initial value has the wrong dimension");
  if (g.l != r.dim()) throw std::invalid_argument("rde_solve: one-form and driver dimensions differ");
  if (drift) {
    require_same_times(*drift, r.x, "rde_solve drift");
    if (drift->dim() != g.d) throw std::invalid_argument("rde_solve: drift has the wrong dimension");
  }
  RdeResult res;
  Mat y(g.d, static_cast<Eigen::Index>(r.size()));
  y.col(0) = xi;
  const std::size_t cells = r.size() - 1;
  std::size_t width = cells;
  std::size_t a = 0;
  int halvings = 0;
  res.converged = true;
  while (a < cells) {
    std::size_t b = std::min(cells, a + width);
    Mat trial = y;
    if (detail::rde_picard_window(g, r, drift, trial, a, b, opt, res.iterations)) {
      y = std::move(trial);
      ++res.windows;
      a = b;
      continue;
    }
    if (halvings >= opt.max_halvings || width == 1) {
      y = std::move(trial);
      res.converged = false;
      ++res.windows;
      a = b;
      continue;
    }
    width = std::max<std::size_t>(1, width / 2);
    ++halvings;
  }
  res.z.y = Path(r.times(), std::move(y));
  res.z.y.grid = r.x.grid;
  res.z.yprime = one_form_path(g, res.z.y);
  res.z.alpha = r.alpha;
  res.z.theta = 2.0 * r.alpha;
  Path again = picard_map(g, r, xi, drift, res.z.y, res.z.yprime);
  res.residual = (again.values - res.z.y.values).cwiseAbs().maxCoeff();
  res.range = sup_norm(res.z.y);
  for (std::size_t i = 0; i < res.z.y.size(); ++i) {
    Vec yi = res.z.y.at(i);
    if (g.value(yi).norm() > g.sup_value * (1.0 + 1e-12)) res.bound_excursion = true;
  }
  return res;
}

}  // namespace roughinc
