#pragma once

// Rough differential inclusions dz in F(t,z) dt + G(z) dX: damped iteration
// of the map Phi(y, y') = (xi + phi(y) + int G(y) dX, G(y)), where phi(y)
// integrates a causal nearest-point selection of t -> F(t, y_t).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughinc/norms.hpp"
#include "roughinc/rough.hpp"
#include "roughinc/sets.hpp"

namespace roughinc {

enum class RdiMode { lsc, usc };

struct RdiConfig {
  Vec xi = Vec::Zero(1);
  double alpha = 0.45;
  double beta = 0.4;
  double gamma = 1.0;
  // velocity bound |F(t,a)| <= L
  double L = 1.0;
  // cone slope, M > L
  double M = 2.0;
  double theta = 0.5;
  int max_iters = 500;
  double fp_tol = 1e-10;
  RdiMode mode = RdiMode::lsc;
  // horizon halvings allowed when the iteration does not converge
  int max_halvings = 3;

  void validate() const {
    if (!(alpha > 1.0 / 3.0 && alpha <= 0.5)) throw std::invalid_argument("rdi: alpha must lie in (1/3, 1/2]");
    if (!(beta > 1.0 / 3.0 && beta < alpha)) throw std::invalid_argument("rdi: beta must lie in (1/3, alpha)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("rdi: gamma must lie in (0, 1]");
    if (!(beta * (2.0 + gamma) > 1.0)) throw std::invalid_argument("rdi: beta (2 + gamma) must exceed 1");
    if (!(L > 0.0) || !(M > L)) throw std::invalid_argument("rdi: need 0 < L < M");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("rdi: damping must lie in (0, 1]");
    if (max_iters < 1 || !(fp_tol > 0.0)) throw std::invalid_argument("rdi: bad iteration limits");
  }
};

struct PhiSelection {
  // Left-constant velocity on the grid.
  Path w;
  // cumulative integral of w, starting at 0
  Path x;
  double max_speed = 0.0;
  bool bound_violated = false;
  // grid intervals where |w_{i+1} - w_i| / dt exceeds the cone slope
  std::size_t cone_violations = 0;
};

// w(t_i) = nearest point of F(t_i, y_{t_i}) to prev_w(t_i); x = int w dt.
inline PhiSelection phi_selection(const SetValuedMap& F, const Path& y, const Path& prev_w, const RdiConfig& cfg) {
  require_same_times(y, prev_w, "phi_selection");
  const std::size_t n = y.size();
  const int d = y.dim();
  if (F.value_dim != d) throw std::invalid_argument("phi_selection: map values must live in the state space");
  Mat w(d, static_cast<Eigen::Index>(n));
  Mat x(d, static_cast<Eigen::Index>(n));
  PhiSelection out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w.col(static_cast<Eigen::Index>(i)) = project(prev_w.at(i), F(y.times[i], y.at(i)));
  }
  w.col(static_cast<Eigen::Index>(n - 1)) = w.col(static_cast<Eigen::Index>(n >= 2 ? n - 2 : 0));
  x.col(0).setZero();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto wi = w.col(static_cast<Eigen::Index>(i));
    double speed = wi.norm();
    out.max_speed = std::max(out.max_speed, speed);
    if (speed > cfg.L * (1.0 + 1e-12)) out.bound_violated = true;
    const double dt = y.times[i + 1] - y.times[i];
    x.col(static_cast<Eigen::Index>(i + 1)) = x.col(static_cast<Eigen::Index>(i)) + dt * wi;
    if (i + 2 < n && (w.col(static_cast<Eigen::Index>(i + 1)) - wi).norm() > cfg.M * dt) ++out.cone_violations;
  }
  out.w = Path(y.times, std::move(w), Interpolation::step);
  out.w.grid = y.grid;
  out.x = Path(y.times, std::move(x));
  out.x.grid = y.grid;
  return out;
}

// Starting velocity for the first Phi evaluation: the nearest point to 0,
// which is the minimal-norm element in usc mode.
inline Path seed_velocity(const SetValuedMap& F, const Path& y) {
  Mat w(y.dim(), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    SetValue s = F(y.times[i], y.at(i));
    w.col(static_cast<Eigen::Index>(i)) = min_norm_selection(s);
  }
  Path out(y.times, std::move(w), Interpolation::step);
  out.grid = y.grid;
  return out;
}

struct RdiResiduals {
  double fixed_point = 0.0;
  double inclusion = 0.0;
};

struct BnormReport {
  // measured beta-Hölder seminorm of z'
  double zprime_holder = 0.0;
  // measured 2 beta-Hölder constant of the remainder of z
  double remainder_holder = 0.0;
  double max_speed = 0.0;
  double speed_margin = 0.0;
};

struct RdiSolution {
  ControlledPath z;
  Path drift;
  Path velocity;
  double fixed_point_residual = 0.0;
  double inclusion_residual = 0.0;
  int iterations = 0;
  bool certified = false;
  double T_star = 0.0;
  std::size_t cone_violations = 0;
  bool bound_violated = false;
  bool first_order_warning = false;
  BnormReport bnorm;
};

// fixed_point = sup_t |z_t - xi - x_t - (int G(z) dX)_t|,
// inclusion   = max over grid intervals of d(w(t_i), F(t_i, z_{t_i})).
inline RdiResiduals rdi_residuals(const RdiSolution& sol, const SetValuedMap& F, const OneForm& G, const RoughPath& X, const Vec& xi) {
  RdiResiduals r;
  ControlledPath integrand = one_form_integrand(G, sol.z.y, sol.z.yprime, X.alpha, 2.0 * X.alpha);
  ControlledPath integral = rough_integral(integrand, X);
  for (std::size_t i = 0; i < sol.z.y.size(); ++i) {
    Vec e = sol.z.y.at(i) - xi - (sol.drift.at(i) - sol.drift.at(0)) - integral.y.at(i);
    r.fixed_point = std::max(r.fixed_point, e.cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i + 1 < sol.z.y.size(); ++i) {
    r.inclusion = std::max(r.inclusion, dist_to_set(sol.velocity.at(i), F(sol.z.y.times[i], sol.z.y.at(i))));
  }
  return r;
}

namespace detail {

inline RoughPath rough_prefix(const RoughPath& X, int k) {
  RoughPath out;
  out.x = dyadic_prefix(X.x, k);
  out.alpha = X.alpha;
  out.second.assign(X.second.begin(), X.second.begin() + static_cast<std::ptrdiff_t>(out.x.size() - 1));
  return out;
}

struct FixedPointRun {
  Path y;
  Path yprime;
  Path w;
  int iterations = 0;
  bool converged = false;
};

inline FixedPointRun damped_iteration(const SetValuedMap& F, const OneForm& G, const RoughPath& X, const RdiConfig& cfg) {
  FixedPointRun run;
  const auto n = static_cast<Eigen::Index>(X.size());
  Mat y0(G.d, n), yp0(G.d * G.l, n);
  Vec g0 = flatten(G.value(cfg.xi));
  for (Eigen::Index i = 0; i < n; ++i) {
    y0.col(i) = cfg.xi;
    yp0.col(i) = g0;
  }
  run.y = Path(X.times(), std::move(y0));
  run.y.grid = X.x.grid;
  run.yprime = Path(X.times(), std::move(yp0));
  run.yprime.grid = X.x.grid;
  run.w = seed_velocity(F, run.y);
  for (int it = 0; it < cfg.max_iters; ++it) {
    ++run.iterations;
    PhiSelection sel = phi_selection(F, run.y, run.w, cfg);
    Path py = picard_map(G, X, cfg.xi, &sel.x, run.y, run.yprime);
    Path pyp = one_form_path(G, run.y);
    double change = std::max((py.values - run.y.values).cwiseAbs().maxCoeff(), (pyp.values - run.yprime.values).cwiseAbs().maxCoeff());
    run.y.values = (1.0 - cfg.theta) * run.y.values + cfg.theta * py.values;
    run.yprime.values = (1.0 - cfg.theta) * run.yprime.values + cfg.theta * pyp.values;
    run.w = std::move(sel.w);
    if (!std::isfinite(change)) break;
    if (change < cfg.fp_tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace detail

// Damped fixed-point iteration of Phi; on failure the horizon is halved up
// to max_halvings times and T_star reports the horizon actually solved. The
// returned velocity is re-selected at the final iterate so the reported
// residuals describe the returned pair. Certified only when both residuals
// are below fp_tol.
inline RdiSolution rdi_fixed_point(const SetValuedMap& F, const OneForm& G, const RoughPath& X, const RdiConfig& cfg) {
  cfg.validate();
  if (!X.x.grid) throw std::invalid_argument("rdi: driver must live on a dyadic grid");
  if (G.d != static_cast<int>(cfg.xi.size()) || G.l != X.dim()) throw std::invalid_argument("rdi: one-form dimensions do not match xi and X");
  if (F.value_dim != G.d) throw std::invalid_argument("rdi: drift map values must live in the state space");
  if (cfg.mode == RdiMode::usc) {
    for (std::size_t i = 0; i < X.size(); i += std::max<std::size_t>(1, X.size() / 8)) {
      if (!is_convex(F(X.times()[i], cfg.xi))) throw std::invalid_argument("rdi: usc mode needs convex values");
    }
  }

  RdiSolution sol;
  sol.first_order_warning = cfg.mode == RdiMode::usc && G.order < 2;
  for (int k = 0; k <= cfg.max_halvings && k <= X.x.grid->level(); ++k) {
    RoughPath Xk = k == 0 ? X : detail::rough_prefix(X, k);
    detail::FixedPointRun run = detail::damped_iteration(F, G, Xk, cfg);
    sol.iterations += run.iterations;

    PhiSelection sel = phi_selection(F, run.y, run.w, cfg);
    sol.z.y = run.y;
    sol.z.yprime = one_form_path(G, run.y);
    sol.z.alpha = Xk.alpha;
    sol.z.theta = 2.0 * Xk.alpha;
    sol.drift = sel.x;
    sol.velocity = sel.w;
    sol.cone_violations = sel.cone_violations;
    sol.bound_violated = sel.bound_violated;
    sol.T_star = Xk.times().back();
    RdiResiduals res = rdi_residuals(sol, F, G, Xk, cfg.xi);
    sol.fixed_point_residual = res.fixed_point;
    sol.inclusion_residual = res.inclusion;
    sol.certified = run.converged && res.fixed_point < cfg.fp_tol && res.inclusion < cfg.fp_tol;

    sol.bnorm.max_speed = sel.max_speed;
    sol.bnorm.speed_margin = cfg.L - sel.max_speed;
    if (sol.z.y.size() >= 2) {
      sol.bnorm.zprime_holder = holder_seminorm(sol.z.yprime, cfg.beta);
      sol.bnorm.remainder_holder = remainder_holder(sol.z, Xk, 2.0 * cfg.beta);
    }
    if (sol.certified) break;
  }
  return sol;
}

}  // namespace roughinc
