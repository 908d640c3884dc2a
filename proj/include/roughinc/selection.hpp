#pragma once

// Finite q-variation selections of a gamma-Hölder compact-set-valued map on
// [0,1], built on dyadic grids, and their certificates.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "roughinc/norms.hpp"
#include "roughinc/sets.hpp"

namespace roughinc {

struct SelectionResult {
  // Left-constant path on pi^(m) of [0,1].
  Path f;
  int level = 0;
  double q_variation = 0.0;
  double bound_rhs = 0.0;
  double membership_residual = 0.0;
};

// f = xi on [0, 2^-m); at each later point tau of pi^(m), f(tau) is the
// nearest point of F(tau) to f(s(tau)). f(1) copies the last value.
inline SelectionResult select_path(const TimeSetMap& F, const Vec& xi, int m) {
  if (m < 0 || m > 30) throw std::invalid_argument("select_path: level out of range");
  if (dist_to_set(xi, F(0.0)) > 1e-12) throw std::invalid_argument("select_path: xi is not in F(0)");
  DyadicGrid g(1.0, m);
  const std::int64_t cells = g.cells();
  Mat v(xi.size(), cells + 1);
  v.col(0) = xi;
  for (std::int64_t i = 1; i < cells; ++i) v.col(i) = project(v.col(ancestor_index(i, m)), F(g.time(i)));
  v.col(cells) = v.col(cells - 1);
  SelectionResult res;
  res.level = m;
  res.f = Path::on_grid(g, std::move(v), Interpolation::step);
  double worst = 0.0;
  for (std::int64_t i = 0; i < cells; ++i) worst = std::max(worst, dist_to_set(res.f.at(static_cast<std::size_t>(i)), F(g.time(i))));
  res.membership_residual = worst;
  return res;
}

// (2 |F|_g 2^g / (1 - 2^-g)) (1 - 2^(1 - g q))^(-1/q)
inline double selection_bound(double gamma, double gamma_norm, double q) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("selection_bound: gamma must lie in (0,1]");
  if (!(q > 1.0 / gamma)) throw std::invalid_argument("selection_bound: q must exceed 1/gamma");
  if (gamma_norm < 0.0) throw std::invalid_argument("selection_bound: negative norm");
  return 2.0 * gamma_norm * std::pow(2.0, gamma) / (1.0 - std::pow(2.0, -gamma)) * std::pow(1.0 - std::pow(2.0, 1.0 - gamma * q), -1.0 / q);
}

struct OscillationCheck {
  int r = 0;
  // max_{t in pi^r} sup_{s in [t, t+2^-r)} |f_{s,t}| against |F|_g 2^(-rg)/(1-2^-g)
  double increment = 0.0;
  double increment_bound = 0.0;
  // max_{t in pi^r} Osc(f, [t, t+2^-r)) against 2 |F|_g 2^(-rg)/(1-2^-g)
  double oscillation = 0.0;
  double oscillation_bound = 0.0;
  bool pass = true;
};

struct SelectionCertificate {
  double q = 0.0;
  double q_variation = 0.0;
  double bound_rhs = 0.0;
  double membership_residual = 0.0;
  // largest |f(tau) - f(s(tau))| / (|F|_g 2^((1-M(tau)) g)) over interior grid times
  double step_ratio = 0.0;
  std::vector<OscillationCheck> oscillation_checks;
  bool membership_pass = false;
  bool qvar_pass = false;
  bool step_pass = false;
  bool oscillation_pass = false;
  bool pass() const { return membership_pass && qvar_pass && step_pass && oscillation_pass; }
};

inline SelectionCertificate certify_selection(SelectionResult& res, const TimeSetMap& F, double q) {
  SelectionCertificate c;
  c.q = q;
  const double g = F.gamma;
  const double norm = F.gamma_norm;
  c.bound_rhs = selection_bound(g, norm, q);
  c.q_variation = p_variation(res.f, q);
  c.membership_residual = res.membership_residual;
  res.q_variation = c.q_variation;
  res.bound_rhs = c.bound_rhs;
  c.membership_pass = c.membership_residual <= 1e-10;
  c.qvar_pass = c.q_variation <= c.bound_rhs;

  const int m = res.level;
  c.step_pass = true;
  for (std::int64_t i = 1; i < (std::int64_t{1} << m); ++i) {
    double jump = (res.f.at(static_cast<std::size_t>(i)) - res.f.at(static_cast<std::size_t>(ancestor_index(i, m)))).norm();
    double allowed = norm * std::pow(2.0, (1 - level_of_index(i, m)) * g);
    if (jump > allowed) c.step_pass = false;
    if (allowed > 0) c.step_ratio = std::max(c.step_ratio, jump / allowed);
    else if (jump > 0) c.step_ratio = std::numeric_limits<double>::infinity();
  }

  c.oscillation_pass = true;
  const double geo = 1.0 / (1.0 - std::pow(2.0, -g));
  for (int r = 0; r <= m; ++r) {
    OscillationCheck oc;
    oc.r = r;
    const std::size_t w = std::size_t{1} << (m - r);
    for (std::size_t start = 0; start + w <= static_cast<std::size_t>(1) << m; start += w) {
      auto base = res.f.at(start);
      for (std::size_t j = start; j < start + w; ++j) oc.increment = std::max(oc.increment, (res.f.at(j) - base).norm());
      oc.oscillation = std::max(oc.oscillation, oscillation(res.f, start, start + w));
    }
    oc.increment_bound = norm * geo * std::pow(2.0, -r * g);
    oc.oscillation_bound = 2.0 * norm * geo * std::pow(2.0, -r * g);
    oc.pass = oc.increment <= oc.increment_bound && oc.oscillation <= oc.oscillation_bound;
    if (!oc.pass) c.oscillation_pass = false;
    c.oscillation_checks.push_back(oc);
  }
  return c;
}

// sup |f^m - f^n| after sampling both on the finer grid; a convergence
// diagnostic between levels.
inline double selection_level_distance(const SelectionResult& a, const SelectionResult& b) {
  int n = std::max(a.level, b.level);
  Path pa = refine_step(a.f, n), pb = refine_step(b.f, n);
  return (pa.values - pb.values).colwise().norm().maxCoeff();
}

}  // namespace roughinc
