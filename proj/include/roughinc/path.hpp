#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughinc/grid.hpp"

namespace roughinc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// How a sampled path is read between its time stamps.
//   linear: continuous piecewise-linear interpolation (drivers, solutions);
//   step:   left-constant, v_t = v_{t_i} on [t_i, t_{i+1}) (velocity paths).
enum class Interpolation { linear, step };

// Closed index range [first, last] of sample positions.
struct IndexWindow {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t count() const { return last - first + 1; }
};

// R^d-valued path sampled at strictly increasing times. Column i of `values`
// is the sample at times[i]. Matrix-valued paths are stored column-major
// flattened, so Frobenius norms coincide with Euclidean norms of columns.
struct Path {
  std::vector<double> times;
  Mat values;
  Interpolation interpolation = Interpolation::linear;
  std::optional<DyadicGrid> grid;

  Path() = default;
  Path(std::vector<double> t, Mat v, Interpolation interp = Interpolation::linear)
      : times(std::move(t)), values(std::move(v)), interpolation(interp) {
    validate();
  }

  static Path on_grid(const DyadicGrid& g, Mat v, Interpolation interp = Interpolation::linear) {
    Path p(g.times(), std::move(v), interp);
    p.grid = g;
    return p;
  }

  static Path zeros(const DyadicGrid& g, int dim, Interpolation interp = Interpolation::linear) {
    return on_grid(g, Mat::Zero(dim, static_cast<Eigen::Index>(g.size())), interp);
  }

  void validate() const {
    if (static_cast<Eigen::Index>(times.size()) != values.cols()) {
      throw std::invalid_argument("path: number of values does not match number of time stamps");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw std::invalid_argument("path: time stamps must be strictly increasing");
    }
  }

  std::size_t size() const { return times.size(); }
  int dim() const { return static_cast<int>(values.rows()); }
  IndexWindow whole() const {
    if (times.empty()) throw std::invalid_argument("path: empty");
    return {0, times.size() - 1};
  }

  auto at(std::size_t i) const { return values.col(static_cast<Eigen::Index>(i)); }
  auto at(std::size_t i) { return values.col(static_cast<Eigen::Index>(i)); }

  // Position of a time stamp; throws when t is not (within 1e-12 relative) a sample time.
  std::size_t index_of(double t) const {
    double tol = 1e-12 * std::max(1.0, std::abs(times.empty() ? 1.0 : times.back()));
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it == times.end() || std::abs(*it - t) > tol) {
      throw std::invalid_argument("time is not aligned to a sample of the path");
    }
    return static_cast<std::size_t>(it - times.begin());
  }

  IndexWindow window(double s, double t) const {
    if (t < s) throw std::invalid_argument("window end precedes window start");
    return {index_of(s), index_of(t)};
  }
};

inline void require_same_times(const Path& a, const Path& b, const char* what) {
  if (a.times.size() != b.times.size()) throw std::invalid_argument(std::string(what) + ": paths have different sizes");
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (a.times[i] != b.times[i]) throw std::invalid_argument(std::string(what) + ": paths do not share time stamps");
  }
}

// Reshape a flattened column-major d x l matrix.
inline Mat as_matrix(const Eigen::Ref<const Vec>& flat, int rows, int cols) {
  if (flat.size() != static_cast<Eigen::Index>(rows) * cols) throw std::invalid_argument("flattened matrix has wrong size");
  return Eigen::Map<const Mat>(flat.data(), rows, cols);
}

inline Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
inline Vec scalar(double a) { return Vec::Constant(1, a); }

// Restriction of a grid path to the dyadic prefix [0, T 2^-k].
inline Path dyadic_prefix(const Path& p, int k) {
  if (!p.grid) throw std::invalid_argument("dyadic_prefix: path is not on a dyadic grid");
  if (k < 0 || k > p.grid->level()) throw std::invalid_argument("dyadic_prefix: prefix level out of range");
  DyadicGrid g(std::ldexp(p.grid->horizon(), -k), p.grid->level() - k);
  Mat v = p.values.leftCols(static_cast<Eigen::Index>(g.size()));
  return Path::on_grid(g, std::move(v), p.interpolation);
}

// Step path on pi^(m) resampled on the finer pi^(n), n >= m.
inline Path refine_step(const Path& p, int n) {
  if (!p.grid) throw std::invalid_argument("refine_step: path is not on a dyadic grid");
  int m = p.grid->level();
  if (n < m) throw std::invalid_argument("refine_step: target level is coarser");
  DyadicGrid g(p.grid->horizon(), n);
  Mat v(p.dim(), static_cast<Eigen::Index>(g.size()));
  std::int64_t stride = std::int64_t{1} << (n - m);
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(g.size()); ++j) {
    std::int64_t i = std::min<std::int64_t>(j / stride, p.grid->cells());
    if (j == g.cells()) i = p.grid->cells();
    v.col(j) = p.values.col(i);
  }
  return Path::on_grid(g, std::move(v), Interpolation::step);
}

}  // namespace roughinc
