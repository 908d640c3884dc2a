#pragma once

// Compact set values, point-to-set distances, metric projection and the
// Hausdorff distance.
//
// Every variant is nonempty and compact by construction. Projection onto a
// convex hull runs Wolfe's minimum-norm-point algorithm on the translated
// vertices, which terminates in finitely many steps and returns a convex
// combination of the vertices.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "roughinc/path.hpp"

namespace roughinc {

struct PointCloud {
  std::vector<Vec> points;
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

struct Box {
  Vec lower;
  Vec upper;
};

struct ConvexHull {
  std::vector<Vec> vertices;
};

using SetValue = std::variant<PointCloud, Ball, Box, ConvexHull>;

inline PointCloud make_cloud(std::vector<Vec> pts) {
  if (pts.empty()) throw std::invalid_argument("point cloud must be nonempty");
  for (const auto& p : pts)
    if (p.size() != pts[0].size()) throw std::invalid_argument("point cloud: mixed dimensions");
  return PointCloud{std::move(pts)};
}

inline Ball make_ball(Vec center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  return Ball{std::move(center), radius};
}

inline Box make_box(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box: dimension mismatch");
  if ((upper.array() < lower.array()).any()) throw std::invalid_argument("box: upper < lower");
  return Box{std::move(lower), std::move(upper)};
}

inline ConvexHull make_hull(std::vector<Vec> vertices) {
  if (vertices.empty()) throw std::invalid_argument("convex hull needs at least one vertex");
  for (const auto& v : vertices)
    if (v.size() != vertices[0].size()) throw std::invalid_argument("convex hull: mixed dimensions");
  return ConvexHull{std::move(vertices)};
}

// Scalar helpers used all over the fixtures.
inline PointCloud cloud1(std::initializer_list<double> xs) {
  std::vector<Vec> pts;
  for (double x : xs) pts.push_back(scalar(x));
  return make_cloud(std::move(pts));
}

inline int set_dim(const SetValue& s) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloud>) return static_cast<int>(v.points.front().size());
        else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(v.center.size());
        else if constexpr (std::is_same_v<T, Box>) return static_cast<int>(v.lower.size());
        else return static_cast<int>(v.vertices.front().size());
      },
      s);
}

inline bool is_convex(const SetValue& s) {
  if (const auto* c = std::get_if<PointCloud>(&s)) return c->points.size() == 1;
  return true;
}

namespace detail {

inline void check_dim(const Vec& p, const SetValue& s) {
  if (p.size() != set_dim(s)) {
    throw std::invalid_argument("dimension mismatch: point has " + std::to_string(p.size()) + " components, set lives in dimension " +
                                std::to_string(set_dim(s)));
  }
}

inline bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Minimum-norm point of conv{pts} (Wolfe 1976). Returns the convex weights.
inline Vec wolfe_min_norm_weights(const std::vector<Vec>& pts) {
  const std::size_t n = pts.size();
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.squaredNorm());
  const double eps = 1e-15 * std::max(scale, 1e-300);

  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pts[i].squaredNorm() < pts[start].squaredNorm()) start = i;

  std::vector<std::size_t> active{start};
  std::vector<double> lambda{1.0};
  Vec x = pts[start];

  for (int major = 0; major < 1000; ++major) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double d = x.dot(pts[i]);
      if (d < best) {
        best = d;
        j = i;
      }
    }
    if (best >= x.squaredNorm() - eps) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      // Affine minimum-norm point over the active set via the KKT system.
      const auto k = static_cast<Eigen::Index>(active.size());
      Mat kkt = Mat::Zero(k + 1, k + 1);
      Vec rhs = Vec::Zero(k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = pts[active[a]].dot(pts[active[b]]);
        kkt(a, k) = 1.0;
        kkt(k, a) = 1.0;
      }
      rhs[k] = 1.0;
      Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      Vec mu = sol.head(k);

      if ((mu.array() > 1e-14).all()) {
        for (Eigen::Index a = 0; a < k; ++a) lambda[a] = mu[a];
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (mu[a] <= 1e-14) {
          double denom = lambda[a] - mu[a];
          if (denom > 0) theta = std::min(theta, lambda[a] / denom);
        }
      }
      for (Eigen::Index a = 0; a < k; ++a) lambda[a] = lambda[a] + theta * (mu[a] - lambda[a]);
      std::vector<std::size_t> na;
      std::vector<double> nl;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (lambda[a] > 1e-14) {
          na.push_back(active[a]);
          nl.push_back(lambda[a]);
        }
      }
      if (na.empty()) {
        na.push_back(active.back());
        nl.push_back(1.0);
      }
      active = std::move(na);
      lambda = std::move(nl);
    }
    double total = 0.0;
    for (double l : lambda) total += l;
    Vec nx = Vec::Zero(x.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      lambda[a] /= total;
      nx += lambda[a] * pts[active[a]];
    }
    if (nx.squaredNorm() >= x.squaredNorm() - eps && major > 0) {
      x = nx;
      break;
    }
    x = nx;
  }

  Vec w = Vec::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < active.size(); ++a) w[static_cast<Eigen::Index>(active[a])] = lambda[a];
  return w;
}

inline Vec hull_projection(const Vec& p, const ConvexHull& h) {
  std::vector<Vec> shifted;
  shifted.reserve(h.vertices.size());
  for (const auto& v : h.vertices) shifted.push_back(v - p);
  Vec w = wolfe_min_norm_weights(shifted);
  Vec q = Vec::Zero(p.size());
  for (std::size_t i = 0; i < h.vertices.size(); ++i) q += w[static_cast<Eigen::Index>(i)] * h.vertices[i];
  return q;
}

}  // namespace detail

// Nearest point of S to p; ties between cloud points go to the
// lexicographically smallest point.
inline Vec project(const Vec& p, const SetValue& s) {
  detail::check_dim(p, s);
  return std::visit(
      [&](const auto& v) -> Vec {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          const Vec* best = &v.points.front();
          double bd = (p - *best).squaredNorm();
          for (const auto& q : v.points) {
            double d = (p - q).squaredNorm();
            if (d < bd || (d == bd && detail::lex_less(q, *best))) {
              bd = d;
              best = &q;
            }
          }
          return *best;
        } else if constexpr (std::is_same_v<T, Ball>) {
          Vec diff = p - v.center;
          double n = diff.norm();
          if (n <= v.radius) return p;
          return v.center + (v.radius / n) * diff;
        } else if constexpr (std::is_same_v<T, Box>) {
          return p.cwiseMax(v.lower).cwiseMin(v.upper);
        } else {
          if (v.vertices.size() == 1) return v.vertices.front();
          return detail::hull_projection(p, v);
        }
      },
      s);
}

inline double dist_to_set(const Vec& p, const SetValue& s) {
  detail::check_dim(p, s);
  if (const auto* c = std::get_if<PointCloud>(&s)) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : c->points) best = std::min(best, (p - q).squaredNorm());
    return std::sqrt(best);
  }
  if (const auto* b = std::get_if<Ball>(&s)) return std::max(0.0, (p - b->center).norm() - b->radius);
  return (p - project(p, s)).norm();
}

// Element of minimal Euclidean norm.
inline Vec min_norm_selection(const SetValue& s) { return project(Vec::Zero(set_dim(s)), s); }

// Largest norm of an element of the set.
inline double set_radius(const SetValue& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        double r = 0.0;
        if constexpr (std::is_same_v<T, PointCloud>) {
          for (const auto& q : v.points) r = std::max(r, q.norm());
        } else if constexpr (std::is_same_v<T, Ball>) {
          r = v.center.norm() + v.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          r = v.lower.cwiseAbs().cwiseMax(v.upper.cwiseAbs()).norm();
        } else {
          for (const auto& q : v.vertices) r = std::max(r, q.norm());
        }
        return r;
      },
      s);
}

struct HausdorffOptions {
  // Points per sphere / face / volume when a set has to be sampled.
  int samples = 1024;
};

namespace detail {

inline std::vector<Vec> box_vertices(const Box& b) {
  const auto d = b.lower.size();
  std::vector<Vec> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? b.upper[i] : b.lower[i];
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<Vec> sphere_points(int d, int count) {
  std::vector<Vec> out;
  if (d == 1) return {scalar(-1.0), scalar(1.0)};
  if (d == 2) {
    for (int k = 0; k < count; ++k) {
      double a = 2.0 * std::numbers::pi * k / count;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      out.push_back(v);
    }
    return out;
  }
  if (d == 3) {
    // Fibonacci lattice.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      out.push_back(v);
    }
    return out;
  }
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  for (int k = 0; k < count; ++k) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = nd(gen);
    out.push_back(v / v.norm());
  }
  return out;
}

// Candidate points where sup_{a in A} d(a, B) is attained (exactly for
// polytopes against convex B, approximately otherwise).
inline std::vector<Vec> witness_points(const SetValue& a, bool target_convex, const HausdorffOptions& opt) {
  if (const auto* c = std::get_if<PointCloud>(&a)) return c->points;
  if (const auto* b = std::get_if<Box>(&a)) {
    if (target_convex) return box_vertices(*b);
    const auto d = b->lower.size();
    int per = std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(opt.samples), 1.0 / static_cast<double>(d)))) + 1);
    std::vector<Vec> out;
    std::vector<int> counter(static_cast<std::size_t>(d), 0);
    while (true) {
      Vec v(d);
      for (Eigen::Index i = 0; i < d; ++i) v[i] = b->lower[i] + (b->upper[i] - b->lower[i]) * counter[static_cast<std::size_t>(i)] / (per - 1);
      out.push_back(v);
      std::size_t i = 0;
      while (i < counter.size() && ++counter[i] == per) counter[i++] = 0;
      if (i == counter.size()) break;
    }
    return out;
  }
  if (const auto* h = std::get_if<ConvexHull>(&a)) {
    std::vector<Vec> out = h->vertices;
    if (target_convex) return out;
    for (std::size_t i = 0; i < h->vertices.size(); ++i)
      for (std::size_t j = i + 1; j < h->vertices.size(); ++j)
        for (int k = 1; k < 64; ++k) out.push_back(h->vertices[i] + (h->vertices[j] - h->vertices[i]) * (k / 64.0));
    std::mt19937_64 gen(6789);
    std::exponential_distribution<double> ed;
    for (int s = 0; s < opt.samples; ++s) {
      Vec w(static_cast<Eigen::Index>(h->vertices.size()));
      for (auto& x : w) x = ed(gen);
      w /= w.sum();
      Vec q = Vec::Zero(h->vertices[0].size());
      for (std::size_t i = 0; i < h->vertices.size(); ++i) q += w[static_cast<Eigen::Index>(i)] * h->vertices[i];
      out.push_back(q);
    }
    return out;
  }
  const auto& ball = std::get<Ball>(a);
  const int d = static_cast<int>(ball.center.size());
  std::vector<Vec> out;
  auto dirs = sphere_points(d, opt.samples);
  std::vector<double> radii = target_convex ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.75, 0.5, 0.25, 0.0};
  if (!target_convex && d == 1) {
    radii.clear();
    for (int k = 0; k <= opt.samples / 2; ++k) radii.push_back(static_cast<double>(k) / (opt.samples / 2));
  }
  for (double r : radii)
    for (const auto& u : dirs) out.push_back(ball.center + r * ball.radius * u);
  return out;
}

inline double directed_hausdorff(const SetValue& a, const SetValue& b, const HausdorffOptions& opt) {
  double best = 0.0;
  for (const auto& p : witness_points(a, is_convex(b), opt)) best = std::max(best, dist_to_set(p, b));
  return best;
}

}  // namespace detail

// max( sup_{a in A} d(a,B), sup_{b in B} d(b,A) ). Exact for clouds, boxes,
// hulls measured against convex sets and for ball pairs; otherwise based on
// sampling at HausdorffOptions::samples points.
inline double hausdorff(const SetValue& a, const SetValue& b, const HausdorffOptions& opt = {}) {
  if (set_dim(a) != set_dim(b)) throw std::invalid_argument("hausdorff: dimension mismatch");
  const auto* ba = std::get_if<Ball>(&a);
  const auto* bb = std::get_if<Ball>(&b);
  if (ba && bb) return (ba->center - bb->center).norm() + std::abs(ba->radius - bb->radius);
  return std::max(detail::directed_hausdorff(a, b, opt), detail::directed_hausdorff(b, a, opt));
}

// Compact-set-valued map (t, z) -> F(t, z). Values are flattened d x l
// matrices for the Young inclusions and R^d vectors for the drifts.
struct SetValuedMap {
  std::function<SetValue(double, const Vec&)> eval;
  int value_dim = 1;
  double gamma = 1.0;
  double gamma_norm = 0.0;
  double sup_bound = 0.0;

  SetValue operator()(double t, const Vec& z) const { return eval(t, z); }
  SetValue operator()(const Vec& z) const { return eval(0.0, z); }
};

// Time-only map t -> F(t) on [0,1].
struct TimeSetMap {
  std::function<SetValue(double)> eval;
  int value_dim = 1;
  double gamma = 1.0;
  double gamma_norm = 0.0;

  SetValue operator()(double t) const { return eval(t); }
};

// Empirical max of hausdorff(F(a),F(b)) / |a-b|^gamma: a lower-bound witness for ||F||_gamma.
inline double estimate_gamma_norm(const SetValuedMap& f, const std::vector<std::pair<Vec, Vec>>& samples, const HausdorffOptions& opt = {}) {
  if (samples.empty()) throw std::invalid_argument("estimate_gamma_norm: empty sample list");
  double best = 0.0;
  for (const auto& [a, b] : samples) {
    double d = (a - b).norm();
    if (d == 0.0) continue;
    best = std::max(best, hausdorff(f(a), f(b), opt) / std::pow(d, f.gamma));
  }
  return best;
}

inline double estimate_gamma_norm(const TimeSetMap& f, const std::vector<std::pair<double, double>>& samples, const HausdorffOptions& opt = {}) {
  if (samples.empty()) throw std::invalid_argument("estimate_gamma_norm: empty sample list");
  double best = 0.0;
  for (const auto& [a, b] : samples) {
    double d = std::abs(a - b);
    if (d == 0.0) continue;
    best = std::max(best, hausdorff(f(a), f(b), opt) / std::pow(d, f.gamma));
  }
  return best;
}

// All pairs of the level-m dyadic times of [0,1].
inline double estimate_gamma_norm_on_grid(const TimeSetMap& f, int level, const HausdorffOptions& opt = {}) {
  DyadicGrid g(1.0, level);
  std::vector<SetValue> vals;
  vals.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vals.push_back(f(g.time(static_cast<std::int64_t>(i))));
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      double d = g.time(static_cast<std::int64_t>(j)) - g.time(static_cast<std::int64_t>(i));
      best = std::max(best, hausdorff(vals[i], vals[j], opt) / std::pow(d, f.gamma));
    }
  return best;
}

}  // namespace roughinc
