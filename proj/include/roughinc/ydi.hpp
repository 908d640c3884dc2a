#pragma once

// Dyadic approximate solutions (z^m, v^m) of the Young differential
// inclusion dz in F(z) dx, the T0 horizon, the representation identity,
// the level-uniform bound checks and the level-to-level Cauchy certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughinc/norms.hpp"
#include "roughinc/sets.hpp"

namespace roughinc {

struct YdiConfig {
  double alpha = 0.75;
  double beta = 0.625;
  double gamma = 1.0;
  double p = 2.0;
  double q = 3.0;
  int min_level = 0;
  int max_level = 12;
  double residual_tol = 1e-3;
  Vec xi = Vec::Zero(1);
  // Starting velocity; the minimal-norm element of F(xi) when unset.
  std::optional<Vec> v0;
  // Split [0,T] into dyadic windows no longer than T0 and restart the
  // construction on each one.
  bool concatenate = false;

  void validate() const {
    if (!(alpha > 0.5 && alpha <= 1.0)) throw std::invalid_argument("ydi: alpha must lie in (1/2, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ydi: gamma must lie in (0, 1]");
    if (!(gamma > 1.0 / alpha - 1.0)) throw std::invalid_argument("ydi: gamma must exceed 1/alpha - 1");
    if (!(beta > 1.0 / (1.0 + gamma) && beta < alpha)) throw std::invalid_argument("ydi: beta must lie in (1/(1+gamma), alpha)");
    if (!(p > 1.0 / (gamma * beta))) throw std::invalid_argument("ydi: p must exceed 1/(gamma beta)");
    if (!(q > p)) throw std::invalid_argument("ydi: q must exceed p");
    if (!(gamma / q + alpha > 1.0)) throw std::invalid_argument("ydi: gamma/q + alpha must exceed 1");
    if (min_level < 0 || max_level < min_level) throw std::invalid_argument("ydi: bad level range");
    if (!(residual_tol > 0.0)) throw std::invalid_argument("ydi: residual_tol must be positive");
  }
};

// min{1, (2|F|_inf |x|_a)^(-2/(a-b)), (2|F|_g |x|_a / (1-2^-(a+bg-1)))^(-2/(a-b)),
//     (|F|_g / (1-2^-(gb)))^(-4/(g(a-b)))}; zero bases give +inf.
inline double horizon_T0(double alpha, double beta, double gamma, double f_sup, double f_gamma, double x_alpha) {
  if (!(alpha > beta)) throw std::invalid_argument("horizon_T0 needs alpha > beta");
  if (f_sup < 0 || f_gamma < 0 || x_alpha < 0) throw std::invalid_argument("horizon_T0: norms must be nonnegative");
  const double e = alpha - beta;
  auto term = [](double base, double expo) { return base == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(base, expo); };
  double t1 = term(2.0 * f_sup * x_alpha, -2.0 / e);
  double t2 = term(2.0 * f_gamma * x_alpha / (1.0 - std::pow(2.0, -(alpha + beta * gamma - 1.0))), -2.0 / e);
  double t3 = term(f_gamma / (1.0 - std::pow(2.0, -gamma * beta)), -4.0 / (gamma * e));
  return std::min({1.0, t1, t2, t3});
}

struct BoundCheck {
  bool pass = true;
  // min over checked items of rhs - lhs
  double worst_margin = std::numeric_limits<double>::infinity();
  // largest lhs/rhs ratio
  double worst_ratio = 0.0;
};

struct BoundReport {
  double S = 0.0;
  double T0 = 0.0;
  BoundCheck uniform_z;
  BoundCheck oscillation;
  BoundCheck pvar_bound;
  double pvar_v = 0.0;
  double pvar_rhs = 0.0;
  bool pass() const { return uniform_z.pass && oscillation.pass && pvar_bound.pass; }
};

struct YdiDiagnostics {
  double inclusion_residual = 0.0;
  double pvar_v = 0.0;
  std::vector<double> cauchy_certificate;
  double T0 = 0.0;
  bool certified = false;
  std::size_t windows = 1;
};

struct YdiSolution {
  // On the driver's grid.
  Path z;
  // Velocity on pi^(m): flattened d x l matrices, left-constant.
  Path v;
  int level = 0;
  YdiDiagnostics diagnostics;

  // v resampled on the driver's grid.
  Path v_fine() const { return z.grid ? refine_step(v, z.grid->level()) : v; }
};

namespace detail {

inline void check_ydi_inputs(const SetValuedMap& f, const Path& x, const Vec& xi, int m) {
  if (!x.grid) throw std::invalid_argument("ydi: driver must be sampled on a dyadic grid");
  if (m < 0 || m > x.grid->level()) throw std::invalid_argument("ydi: level exceeds the driver's grid level");
  if (f.value_dim != static_cast<int>(xi.size()) * x.dim()) {
    throw std::invalid_argument("ydi: map values must be d x l matrices with d = dim(xi), l = dim(x)");
  }
}

}  // namespace detail

// The level-m construction: v = v_0 on [0, T 2^-m); at every later point
// t_i of pi^(m), v_{t_i} is the nearest point of F(z_{t_i}) to v at the
// ancestor s(t_i), and z moves by v_{t_i} x_{t_i, .} until the next point.
// v_T copies the last value.
inline YdiSolution ydi_approximate(const SetValuedMap& f, const Path& x, const Vec& xi, int m, const std::optional<Vec>& v0 = std::nullopt) {
  detail::check_ydi_inputs(f, x, xi, m);
  const int d = static_cast<int>(xi.size());
  const int l = x.dim();
  const int fine = x.grid->level();
  const std::int64_t cells = std::int64_t{1} << m;
  const std::int64_t stride = std::int64_t{1} << (fine - m);
  DyadicGrid coarse = x.grid->coarsen(m);

  Mat vv(d * l, cells + 1);
  Mat zz(d, static_cast<Eigen::Index>(x.size()));
  zz.col(0) = xi;
  Vec start = v0 ? *v0 : min_norm_selection(f(0.0, xi));
  if (dist_to_set(start, f(0.0, xi)) > 1e-12) throw std::invalid_argument("ydi: starting velocity is not in F(xi)");
  vv.col(0) = start;

  for (std::int64_t i = 0; i < cells; ++i) {
    const std::int64_t base = i * stride;
    if (i > 0) {
      Vec anc = vv.col(ancestor_index(i, m));
      vv.col(i) = project(anc, f(coarse.time(i), zz.col(base)));
    }
    Mat vm = as_matrix(vv.col(i), d, l);
    for (std::int64_t j = base + 1; j <= base + stride; ++j) {
      zz.col(j) = zz.col(base) + vm * (x.at(static_cast<std::size_t>(j)) - x.at(static_cast<std::size_t>(base)));
    }
  }
  vv.col(cells) = vv.col(cells - 1);

  YdiSolution sol;
  sol.level = m;
  sol.z = Path(x.times, std::move(zz));
  sol.z.grid = x.grid;
  sol.v = Path::on_grid(coarse, std::move(vv), Interpolation::step);
  return sol;
}

// max over pi^(m) times in [0,T) of d(v_t, F(z_t)).
inline double inclusion_residual(const YdiSolution& sol, const SetValuedMap& f) {
  const int m = sol.v.grid->level();
  const std::int64_t stride = std::int64_t{1} << (sol.z.grid->level() - m);
  double worst = 0.0;
  for (std::int64_t i = 0; i < sol.v.grid->cells(); ++i) {
    worst = std::max(worst, dist_to_set(sol.v.at(static_cast<std::size_t>(i)), f(sol.v.times[static_cast<std::size_t>(i)], sol.z.at(static_cast<std::size_t>(i * stride)))));
  }
  return worst;
}

// Largest defect, over consecutive s < t of pi^(n), of
//   z_{s,t} = v_s x_{s,t} + sum_{k=0}^{m-n-1} sum_{i<2^k} v_{s_i^k, s_{2i+1}^{k+1}} x_{s_{2i+1}^{k+1}, s_{i+1}^k}
// with s_i^k = s + i 2^{-n-k} T.
inline double representation_check(const YdiSolution& sol, const Path& x, int n) {
  const int m = sol.level;
  if (n < 0 || n > m) throw std::invalid_argument("representation_check: n must lie in [0, m]");
  require_same_times(sol.z, x, "representation_check");
  const int fine = x.grid->level();
  const int d = sol.z.dim();
  const int l = x.dim();
  const std::int64_t vstride_n = std::int64_t{1} << (m - n);
  auto vat = [&](std::int64_t vi) { return as_matrix(sol.v.at(static_cast<std::size_t>(vi)), d, l); };
  auto xat = [&](std::int64_t vi) { return x.at(static_cast<std::size_t>(vi << (fine - m))); };
  double worst = 0.0;
  for (std::int64_t k0 = 0; k0 < (std::int64_t{1} << n); ++k0) {
    const std::int64_t s = k0 * vstride_n;
    const std::int64_t t = s + vstride_n;
    Vec rhs = vat(s) * (xat(t) - xat(s));
    for (int k = 0; k < m - n; ++k) {
      const std::int64_t h = vstride_n >> k;  // spacing of s^k
      for (std::int64_t i = 0; i < (std::int64_t{1} << k); ++i) {
        std::int64_t ski = s + i * h;
        std::int64_t mid = ski + h / 2;  // s_{2i+1}^{k+1}
        std::int64_t next = ski + h;     // s_{i+1}^k
        rhs += (vat(mid) - vat(ski)) * (xat(next) - xat(mid));
      }
    }
    Vec lhs = sol.z.at(static_cast<std::size_t>(t << (fine - m))) - sol.z.at(static_cast<std::size_t>(s << (fine - m)));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

namespace detail {

inline void record(BoundCheck& c, double lhs, double rhs) {
  c.worst_margin = std::min(c.worst_margin, rhs - lhs);
  if (rhs > 0) c.worst_ratio = std::max(c.worst_ratio, lhs / rhs);
  else if (lhs > 0) c.worst_ratio = std::numeric_limits<double>::infinity();
  if (lhs > rhs) c.pass = false;
}

}  // namespace detail

// The three level-uniform estimates on [0,S], checked literally for every
// n <= m with S = T 2^-k a dyadic prefix of the horizon and S <= T0:
//   max_{[s,t] in pi^(n)} |z_{s,t}|            <= S^((a-b)/2) (S 2^-n)^b
//   max_{[s,t] in pi^(n)} Osc(v, [s,t))        <= S^((a-b)g/4) (S 2^-n)^(gb)
//   ||v||_{p-var,[0,S]} <= (1-2^(-gbp))^(-1/p) S^((a-b)g/4 + gb)
inline BoundReport bound_report(const YdiSolution& sol, const YdiConfig& cfg, const Path& x, double S, double T0) {
  if (S > T0 * (1.0 + 1e-12)) throw std::invalid_argument("bound_report: S exceeds T0");
  const double T = x.grid->horizon();
  int k = 0;
  while (k <= sol.level && std::abs(std::ldexp(T, -k) - S) > 1e-12 * T) ++k;
  if (k > sol.level) throw std::invalid_argument("bound_report: S must be T 2^-k for some k <= m");
  const double a = cfg.alpha, b = cfg.beta, g = cfg.gamma, p = cfg.p;

  Path z = dyadic_prefix(sol.z, k);
  Path v = dyadic_prefix(sol.v, k);
  const int m = sol.level - k;
  const int fine = z.grid->level();

  BoundReport rep;
  rep.S = S;
  rep.T0 = T0;
  for (int n = 0; n <= m; ++n) {
    const std::int64_t zs = std::int64_t{1} << (fine - n);
    const std::int64_t vs = std::int64_t{1} << (m - n);
    double zmax = 0.0, omax = 0.0;
    for (std::int64_t i = 0; i < (std::int64_t{1} << n); ++i) {
      zmax = std::max(zmax, (z.at(static_cast<std::size_t>((i + 1) * zs)) - z.at(static_cast<std::size_t>(i * zs))).norm());
      omax = std::max(omax, oscillation(v, static_cast<std::size_t>(i * vs), static_cast<std::size_t>((i + 1) * vs)));
    }
    detail::record(rep.uniform_z, zmax, std::pow(S, (a - b) / 2.0) * std::pow(std::ldexp(S, -n), b));
    detail::record(rep.oscillation, omax, std::pow(S, (a - b) * g / 4.0) * std::pow(std::ldexp(S, -n), g * b));
  }
  rep.pvar_v = p_variation(v, p);
  rep.pvar_rhs = std::pow(1.0 / (1.0 - std::pow(2.0, -g * b * p)), 1.0 / p) * std::pow(S, (a - b) * g / 4.0 + g * b);
  detail::record(rep.pvar_bound, rep.pvar_v, rep.pvar_rhs);
  return rep;
}

// Cauchy certificate between two levels: the interpolation bound on
// ||v^m - v^n||_{q-var} with both velocities sampled on the driver's grid.
inline double cauchy_certificate(const YdiSolution& a, const YdiSolution& b, double p, double q) {
  return interpolation_qvar_bound(a.v_fine(), b.v_fine(), p, q);
}

struct YdiRun {
  YdiSolution solution;
  // Solutions at every level tried, coarsest first.
  std::vector<YdiSolution> levels;
};

namespace detail {

inline YdiSolution ydi_concatenated(const SetValuedMap& f, const Path& x, const YdiConfig& cfg, int m, int k) {
  // 2^k windows of length T 2^-k, each built at level m - k from its own start.
  const int fine = x.grid->level();
  const std::int64_t wcells = std::int64_t{1} << (fine - k);
  const int d = static_cast<int>(cfg.xi.size());
  const int l = x.dim();
  Mat zz(d, static_cast<Eigen::Index>(x.size()));
  Mat vv(d * l, (std::int64_t{1} << m) + 1);
  Vec start = cfg.xi;
  std::optional<Vec> v0 = cfg.v0;
  for (std::int64_t w = 0; w < (std::int64_t{1} << k); ++w) {
    DyadicGrid g(std::ldexp(x.grid->horizon(), -k), fine - k);
    Mat xv = x.values.middleCols(w * wcells, wcells + 1);
    Path xw = Path::on_grid(g, xv);
    YdiSolution part = ydi_approximate(f, xw, start, m - k, w == 0 ? v0 : std::nullopt);
    zz.middleCols(w * wcells, wcells + 1) = part.z.values;
    const std::int64_t vc = std::int64_t{1} << (m - k);
    vv.middleCols(w * vc, vc + 1) = part.v.values;
    start = part.z.values.col(wcells);
  }
  YdiSolution sol;
  sol.level = m;
  sol.z = Path(x.times, std::move(zz));
  sol.z.grid = x.grid;
  sol.v = Path::on_grid(x.grid->coarsen(m), std::move(vv), Interpolation::step);
  return sol;
}

}  // namespace detail

// Runs the construction at levels min_level..max_level and stops as soon as
// the certificate between consecutive levels drops below residual_tol. A
// zero driver returns the level-0 pair immediately. The result is flagged
// certified only when the tolerance was met.
inline YdiRun ydi_solve(const SetValuedMap& f, const Path& x, const YdiConfig& cfg, double x_alpha_norm) {
  cfg.validate();
  detail::check_ydi_inputs(f, x, cfg.xi, std::min(cfg.max_level, x.grid ? x.grid->level() : 0));
  const int top = std::min(cfg.max_level, x.grid->level());
  const double T0 = horizon_T0(cfg.alpha, cfg.beta, cfg.gamma, f.sup_bound, f.gamma_norm, x_alpha_norm);

  int k = 0;
  if (cfg.concatenate) {
    while (std::ldexp(x.grid->horizon(), -k) > T0 && k < top) ++k;
  }

  YdiRun run;
  bool zero_driver = (x.values.array() == 0.0).all();
  for (int m = std::max(cfg.min_level, k); m <= top; ++m) {
    YdiSolution sol = k > 0 ? detail::ydi_concatenated(f, x, cfg, m, k) : ydi_approximate(f, x, cfg.xi, m, cfg.v0);
    sol.diagnostics.T0 = T0;
    sol.diagnostics.windows = std::size_t{1} << k;
    sol.diagnostics.inclusion_residual = inclusion_residual(sol, f);
    sol.diagnostics.pvar_v = p_variation(sol.v, cfg.p);
    if (!run.levels.empty()) {
      sol.diagnostics.cauchy_certificate = run.levels.back().diagnostics.cauchy_certificate;
      sol.diagnostics.cauchy_certificate.push_back(cauchy_certificate(run.levels.back(), sol, cfg.p, cfg.q));
    }
    run.levels.push_back(sol);
    if (zero_driver) {
      run.levels.back().diagnostics.certified = true;
      break;
    }
    const auto& cert = run.levels.back().diagnostics.cauchy_certificate;
    if (!cert.empty() && cert.back() < cfg.residual_tol) {
      run.levels.back().diagnostics.certified = true;
      break;
    }
  }
  run.solution = run.levels.back();
  return run;
}

}  // namespace roughinc
