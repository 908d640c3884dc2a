#pragma once

// Path norms on sampled data: p-variation, Hölder seminorms, oscillation,
// controls, and the q-variation interpolation certificate.
//
// Sampled paths are treated as the whole path: the p-variation is the
// supremum over partitions made of sample points, which is exact for the
// piecewise-constant and piecewise-linear paths built in this library.
// All routines are O(n^2) in the number of samples in the window.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "roughinc/path.hpp"

namespace roughinc {

namespace detail {

inline void check_window(const Path& path, const IndexWindow& w) {
  if (path.size() == 0) throw std::invalid_argument("empty path");
  if (w.first > w.last || w.last >= path.size()) throw std::invalid_argument("window outside the path");
}

// |a|^p without pow() for the common exponents.
inline double abs_pow(double a, double p) {
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// Drops consecutive repeated samples; the p-variation sup is unchanged.
inline std::vector<Eigen::Index> distinct_runs(const Path& path, const IndexWindow& w) {
  std::vector<Eigen::Index> keep;
  keep.reserve(w.count());
  for (std::size_t i = w.first; i <= w.last; ++i) {
    auto idx = static_cast<Eigen::Index>(i);
    if (!keep.empty() && path.values.col(idx) == path.values.col(keep.back())) continue;
    keep.push_back(idx);
  }
  return keep;
}

}  // namespace detail

// ||x||_{p-var,[s,t]} by dynamic programming:
//   V(j) = max_{i<j} V(i) + |x_j - x_i|^p,  result V(last)^(1/p).
inline double p_variation(const Path& path, double p, const IndexWindow& w) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-variation requires p >= 1");
  detail::check_window(path, w);
  if (w.first == w.last) return 0.0;
  auto idx = detail::distinct_runs(path, w);
  const std::size_t n = idx.size();
  if (p == 1.0) {
    double total = 0.0;
    for (std::size_t j = 1; j < n; ++j) total += (path.values.col(idx[j]) - path.values.col(idx[j - 1])).norm();
    return total;
  }
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    auto xj = path.values.col(idx[j]);
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < j; ++i) {
      double cand = best[i] + detail::abs_pow((xj - path.values.col(idx[i])).norm(), p);
      if (cand > v) v = cand;
    }
    best[j] = v;
  }
  return std::pow(best[n - 1], 1.0 / p);
}

inline double p_variation(const Path& path, double p) { return p_variation(path, p, path.whole()); }

inline double p_variation(const Path& path, double p, double s, double t) { return p_variation(path, p, path.window(s, t)); }

inline double sup_norm(const Path& path, const IndexWindow& w) {
  detail::check_window(path, w);
  double m = 0.0;
  for (std::size_t i = w.first; i <= w.last; ++i) m = std::max(m, path.at(i).norm());
  return m;
}

inline double sup_norm(const Path& path) { return sup_norm(path, path.whole()); }

// max over sample pairs s < t of |x_t - x_s| / (t - s)^alpha.
inline double holder_seminorm(const Path& path, double alpha, const IndexWindow& w) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("Hölder exponent must lie in (0,1]");
  detail::check_window(path, w);
  if (w.count() < 2) throw std::invalid_argument("Hölder seminorm needs at least two samples");
  double best = 0.0;
  for (std::size_t i = w.first; i < w.last; ++i) {
    auto xi = path.at(i);
    for (std::size_t j = i + 1; j <= w.last; ++j) {
      double r = (path.at(j) - xi).norm() / std::pow(path.times[j] - path.times[i], alpha);
      best = std::max(best, r);
    }
  }
  return best;
}

inline double holder_seminorm(const Path& path, double alpha) { return holder_seminorm(path, alpha, path.whole()); }

// Osc(v, I) over the half-open sample range [first, end): largest distance
// between two samples in the range.
inline double oscillation(const Path& path, std::size_t first, std::size_t end) {
  if (end <= first || end > path.size()) throw std::invalid_argument("oscillation: empty window");
  std::vector<Eigen::Index> idx;
  for (std::size_t i = first; i < end; ++i) {
    auto k = static_cast<Eigen::Index>(i);
    if (!idx.empty() && path.values.col(k) == path.values.col(idx.back())) continue;
    idx.push_back(k);
  }
  if (path.dim() == 1) {
    double lo = path.values(0, idx[0]), hi = lo;
    for (auto k : idx) {
      lo = std::min(lo, path.values(0, k));
      hi = std::max(hi, path.values(0, k));
    }
    return hi - lo;
  }
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      best = std::max(best, (path.values.col(idx[b]) - path.values.col(idx[a])).norm());
  return best;
}

// Half-open time window [s, t): samples with s <= time < t.
inline double oscillation(const Path& path, double s, double t) {
  auto lo = std::lower_bound(path.times.begin(), path.times.end(), s);
  auto hi = std::lower_bound(path.times.begin(), path.times.end(), t);
  return oscillation(path, static_cast<std::size_t>(lo - path.times.begin()), static_cast<std::size_t>(hi - path.times.begin()));
}

struct NormReport {
  double p = 1.0;
  double alpha = 1.0;
  double p_variation = 0.0;
  double holder_seminorm = 0.0;
  double sup_norm = 0.0;
  // ||y||_{p-var} + ||y||_inf
  double pvar_norm = 0.0;
  double holder_norm = 0.0;
};

inline NormReport norm_report(const Path& path, double p, double alpha) {
  NormReport r;
  r.p = p;
  r.alpha = alpha;
  r.p_variation = p_variation(path, p);
  r.holder_seminorm = path.size() >= 2 ? holder_seminorm(path, alpha) : 0.0;
  r.sup_norm = sup_norm(path);
  r.pvar_norm = r.p_variation + r.sup_norm;
  r.holder_norm = r.holder_seminorm + r.sup_norm;
  return r;
}

// Two-time controls evaluated on sample index pairs.
struct HolderControl {
  const Path* path;
  double alpha;
  // ||x||_{alpha,[s,t]}^(1/alpha)
  double operator()(std::size_t s, std::size_t t) const {
    if (s == t) return 0.0;
    return std::pow(holder_seminorm(*path, alpha, {s, t}), 1.0 / alpha);
  }
};

struct PVariationControl {
  const Path* path;
  double p;
  // ||x||_{p-var,[s,t]}^p, which is superadditive.
  double operator()(std::size_t s, std::size_t t) const {
    if (s == t) return 0.0;
    return std::pow(p_variation(*path, p, IndexWindow{s, t}), p);
  }
};

// Upper bound for ||pm - pn||_{q-var}:
//   (2 ||pm - pn||_inf)^((q-p)/q) (||pm||_{p-var} + ||pn||_{p-var})^(p/q).
inline double interpolation_qvar_bound(const Path& pm, const Path& pn, double p, double q) {
  if (!(p >= 1.0) || !(q > p)) throw std::invalid_argument("interpolation bound requires q > p >= 1");
  require_same_times(pm, pn, "interpolation bound");
  if (pm.dim() != pn.dim()) throw std::invalid_argument("interpolation bound: dimension mismatch");
  if (pm.size() == 0) throw std::invalid_argument("interpolation bound: empty paths");
  double sup = (pm.values - pn.values).colwise().norm().maxCoeff();
  if (sup == 0.0) return 0.0;
  double pv = p_variation(pm, p) + p_variation(pn, p);
  return std::pow(2.0 * sup, (q - p) / q) * std::pow(pv, p / q);
}

}  // namespace roughinc
